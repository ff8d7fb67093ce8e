#pragma once

#include <cstddef>

#include "ncmetric/matrix.hpp"

namespace ncm {

/// A point of level n over the base algebra M_d(ℂ): an (n·d)×(n·d) matrix.
class NcPoint {
 public:
  NcPoint(std::size_t base_dim, std::size_t level, CMatrix mat);

  /// Level-n point from an n×n scalar matrix (base_dim 1).
  static NcPoint scalar_level(CMatrix mat);
  static NcPoint scalar(cplx z) { return scalar_level(CMatrix::scalar(z)); }

  std::size_t base_dim() const noexcept { return base_dim_; }
  std::size_t level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return base_dim_ * level_; }
  const CMatrix& mat() const noexcept { return mat_; }

 private:
  std::size_t base_dim_;
  std::size_t level_;
  CMatrix mat_;
};

/// An (n·d)×(m·d) direction b between points of levels n and m.
class NcDirection {
 public:
  NcDirection(std::size_t base_dim, std::size_t row_level, std::size_t col_level, CMatrix mat);

  static NcDirection scalar(cplx z) { return NcDirection(1, 1, 1, CMatrix::scalar(z)); }
  /// Direction a - c between two points at the same level.
  static NcDirection difference(const NcPoint& a, const NcPoint& c);
  static NcDirection from_point(const NcPoint& p) {
    return NcDirection(p.base_dim(), p.level(), p.level(), p.mat());
  }

  std::size_t base_dim() const noexcept { return base_dim_; }
  std::size_t row_level() const noexcept { return row_level_; }
  std::size_t col_level() const noexcept { return col_level_; }
  const CMatrix& mat() const noexcept { return mat_; }

  NcDirection scaled(cplx s) const { return NcDirection(base_dim_, row_level_, col_level_, s * mat_); }

 private:
  std::size_t base_dim_;
  std::size_t row_level_;
  std::size_t col_level_;
  CMatrix mat_;
};

NcPoint direct_sum(const NcPoint& a, const NcPoint& c);
NcDirection direct_sum(const NcDirection& a, const NcDirection& c);

/// Z ⊗ b for a k×k scalar matrix Z.
NcDirection amplify(const CMatrix& z, const NcDirection& b);
/// I_k ⊗ a.
NcPoint amplify(std::size_t k, const NcPoint& a);

/// [[a, b], [0, c]].
NcPoint block_upper(const NcPoint& a, const NcDirection& b, const NcPoint& c);

/// (U ⊗ I_d) a (U* ⊗ I_d) for a scalar unitary U.
NcPoint unitary_conjugate(const CMatrix& u, const NcPoint& a);

/// (U ⊗ I_d) b (V* ⊗ I_d).
NcDirection unitary_conjugate(const CMatrix& u, const NcDirection& b, const CMatrix& v);

bool is_unitary(const CMatrix& u, double tol = 1e-10);

/// Point with the adjoint matrix (same level).
NcPoint adjoint(const NcPoint& a);

}  // namespace ncm
