#include "ncmetric/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "ncmetric/error.hpp"

namespace ncm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::BaseDimMismatch: return "BaseDimMismatch";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::PathBlocked: return "PathBlocked";
    case ErrorKind::MappingViolation: return "MappingViolation";
    case ErrorKind::NestingViolation: return "NestingViolation";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::NotInHalfPlane: return "NotInHalfPlane";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw NcError(ErrorKind::DimMismatch, "entry count does not match rows*cols");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw NcError(ErrorKind::DimMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diag(std::span<const cplx> values) {
  CMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

CMatrix CMatrix::diag(std::initializer_list<cplx> values) {
  return diag(std::span<const cplx>(values.begin(), values.size()));
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_)
    throw NcError(ErrorKind::DimMismatch, "block out of range");
  CMatrix out(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
  return out;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& src) {
  if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_)
    throw NcError(ErrorKind::DimMismatch, "set_block out of range");
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (std::size_t j = 0; j < src.cols(); ++j) (*this)(r0 + i, c0 + j) = src(i, j);
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw NcError(ErrorKind::DimMismatch, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw NcError(ErrorKind::DimMismatch, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw NcError(ErrorKind::DimMismatch, "matrix product");
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CMatrix add_identity(CMatrix a, cplx s) {
  if (!a.is_square()) throw NcError(ErrorKind::NotSquare, "add_identity");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += s;
  return a;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}

CMatrix real_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix imag_part(const CMatrix& a) { return cplx(0.0, -0.5) * (a - a.adjoint()); }

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw NcError(ErrorKind::DimMismatch, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace ncm
