#include "ncmetric/ncpoint.hpp"

#include <string>

#include "ncmetric/error.hpp"
#include "ncmetric/linalg.hpp"

namespace ncm {

NcPoint::NcPoint(std::size_t base_dim, std::size_t level, CMatrix mat)
    : base_dim_(base_dim), level_(level), mat_(std::move(mat)) {
  if (base_dim_ < 1 || level_ < 1) throw NcError(ErrorKind::DimMismatch, "base_dim and level must be >= 1");
  if (mat_.rows() != level_ * base_dim_ || mat_.cols() != level_ * base_dim_)
    throw NcError(ErrorKind::DimMismatch, "point matrix must be (level*base_dim) square");
}

NcPoint NcPoint::scalar_level(CMatrix mat) {
  const std::size_t n = mat.rows();
  return NcPoint(1, n, std::move(mat));
}

NcDirection::NcDirection(std::size_t base_dim, std::size_t row_level, std::size_t col_level, CMatrix mat)
    : base_dim_(base_dim), row_level_(row_level), col_level_(col_level), mat_(std::move(mat)) {
  if (base_dim_ < 1 || row_level_ < 1 || col_level_ < 1)
    throw NcError(ErrorKind::DimMismatch, "base_dim and levels must be >= 1");
  if (mat_.rows() != row_level_ * base_dim_ || mat_.cols() != col_level_ * base_dim_)
    throw NcError(ErrorKind::DimMismatch, "direction matrix has wrong shape");
}

NcDirection NcDirection::difference(const NcPoint& a, const NcPoint& c) {
  if (a.base_dim() != c.base_dim()) throw NcError(ErrorKind::BaseDimMismatch, "difference");
  if (a.level() != c.level()) throw NcError(ErrorKind::DimMismatch, "difference needs equal levels");
  return NcDirection(a.base_dim(), a.level(), a.level(), a.mat() - c.mat());
}

NcPoint direct_sum(const NcPoint& a, const NcPoint& c) {
  if (a.base_dim() != c.base_dim()) throw NcError(ErrorKind::BaseDimMismatch, "direct_sum");
  return NcPoint(a.base_dim(), a.level() + c.level(), direct_sum(a.mat(), c.mat()));
}

NcDirection direct_sum(const NcDirection& a, const NcDirection& c) {
  if (a.base_dim() != c.base_dim()) throw NcError(ErrorKind::BaseDimMismatch, "direct_sum");
  return NcDirection(a.base_dim(), a.row_level() + c.row_level(), a.col_level() + c.col_level(),
                     direct_sum(a.mat(), c.mat()));
}

NcDirection amplify(const CMatrix& z, const NcDirection& b) {
  if (!z.is_square()) throw NcError(ErrorKind::NotSquare, "amplify needs square Z");
  const std::size_t k = z.rows();
  return NcDirection(b.base_dim(), k * b.row_level(), k * b.col_level(), kron(z, b.mat()));
}

NcPoint amplify(std::size_t k, const NcPoint& a) {
  return NcPoint(a.base_dim(), k * a.level(), kron(CMatrix::identity(k), a.mat()));
}

NcPoint block_upper(const NcPoint& a, const NcDirection& b, const NcPoint& c) {
  if (a.base_dim() != b.base_dim() || c.base_dim() != b.base_dim())
    throw NcError(ErrorKind::BaseDimMismatch, "block_upper");
  if (b.row_level() != a.level() || b.col_level() != c.level())
    throw NcError(ErrorKind::DimMismatch, "block_upper: b must be level(a) x level(c)");
  CMatrix m(a.dim() + c.dim(), a.dim() + c.dim());
  m.set_block(0, 0, a.mat());
  m.set_block(0, a.dim(), b.mat());
  m.set_block(a.dim(), a.dim(), c.mat());
  return NcPoint(a.base_dim(), a.level() + c.level(), std::move(m));
}

bool is_unitary(const CMatrix& u, double tol) {
  if (!u.is_square()) return false;
  return (u.adjoint() * u - CMatrix::identity(u.rows())).frobenius_norm() <= tol;
}

NcPoint unitary_conjugate(const CMatrix& u, const NcPoint& a) {
  if (!is_unitary(u)) throw NcError(ErrorKind::NotUnitary, "unitary_conjugate");
  if (u.rows() != a.level()) throw NcError(ErrorKind::DimMismatch, "unitary size must equal level");
  const CMatrix ud = kron(u, CMatrix::identity(a.base_dim()));
  return NcPoint(a.base_dim(), a.level(), ud * a.mat() * ud.adjoint());
}

NcDirection unitary_conjugate(const CMatrix& u, const NcDirection& b, const CMatrix& v) {
  if (!is_unitary(u) || !is_unitary(v)) throw NcError(ErrorKind::NotUnitary, "unitary_conjugate");
  if (u.rows() != b.row_level() || v.rows() != b.col_level())
    throw NcError(ErrorKind::DimMismatch, "unitary sizes must equal levels");
  const CMatrix id = CMatrix::identity(b.base_dim());
  return NcDirection(b.base_dim(), b.row_level(), b.col_level(),
                     kron(u, id) * b.mat() * kron(v, id).adjoint());
}

NcPoint adjoint(const NcPoint& a) { return NcPoint(a.base_dim(), a.level(), a.mat().adjoint()); }

}  // namespace ncm
