#pragma once

#include <vector>

#include "ncmetric/matrix.hpp"

namespace ncm {

/// Relative tolerance for treating a matrix as Hermitian.
inline constexpr double kHermitianTol = 1e-12;
/// Default relative margin for strict positivity.
inline constexpr double kPositivityMargin = 1e-10;
/// Relative pivot threshold below which LU declares a matrix singular.
inline constexpr double kSingularPivot = 1e-13;

struct HermEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors
  int sweeps = 0;
};

bool is_hermitian(const CMatrix& a, double rel_tol = kHermitianTol);

/// Cyclic Jacobi eigensolver. Throws NonHermitianInput when `a` is not Hermitian.
HermEig herm_eig(const CMatrix& a);

double min_eigenvalue(const CMatrix& hermitian);
double max_eigenvalue(const CMatrix& hermitian);

/// λ_min(A) > margin · max(1, ||A||).
bool is_strictly_positive(const CMatrix& hermitian, double margin = kPositivityMargin);

/// Largest singular value.
double operator_norm(const CMatrix& a);

/// Partial-pivot LU inverse; SingularMatrix when a pivot drops below 1e-13·||A||_F.
CMatrix inverse(const CMatrix& a);

/// Solves X·A = B, i.e. returns B·A^{-1}.
CMatrix right_divide(const CMatrix& b, const CMatrix& a);

/// Hermitian S with S·A·S = I. NotPositiveDefinite unless λ_min(A) > 0.
CMatrix psd_inv_sqrt(const CMatrix& a);
CMatrix psd_sqrt(const CMatrix& a);

/// Eigenvalues of a general square matrix (Hessenberg reduction + shifted QR).
std::vector<cplx> eigenvalues(const CMatrix& a);

}  // namespace ncm
