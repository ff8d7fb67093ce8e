#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ncm {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
  static CMatrix identity(std::size_t n);
  static CMatrix scalar(cplx z) { return CMatrix(1, 1, {z}); }
  static CMatrix diag(std::span<const cplx> values);
  static CMatrix diag(std::initializer_list<cplx> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  CMatrix adjoint() const;
  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& src);

  double frobenius_norm() const;
  double max_abs() const;
  cplx trace() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);

/// a + s·I for square a.
CMatrix add_identity(CMatrix a, cplx s);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);

/// (A + A*)/2 and (A - A*)/2i.
CMatrix real_part(const CMatrix& a);
CMatrix imag_part(const CMatrix& a);

/// Largest entrywise distance between two equally shaped matrices.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

}  // namespace ncm
