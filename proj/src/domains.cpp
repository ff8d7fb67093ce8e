#include "ncmetric/domains.hpp"

#include <algorithm>
#include <cmath>

#include "ncmetric/error.hpp"
#include "ncmetric/linalg.hpp"

namespace ncm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const cplx kTwoI(0.0, 2.0);

CMatrix eval_g(const NcFunctionSpec& g, const CMatrix& x) {
  try {
    return apply(g, x);
  } catch (const NcError& e) {
    throw NcError(ErrorKind::EvaluationFailure, std::string("kernel map: ") + e.what());
  }
}

CMatrix ball_form(const CMatrix& x, const CMatrix& p, const CMatrix& y) { return p - x * p * y.adjoint(); }
CMatrix halfplane_form(const CMatrix& x, const CMatrix& p, const CMatrix& y) {
  return (x * p - p * y.adjoint()) * (1.0 / kTwoI);
}

CMatrix matrix_power(const CMatrix& a, std::size_t n) {
  CMatrix r = CMatrix::identity(a.rows());
  for (std::size_t k = 0; k < n; ++k) r = r * a;
  return r;
}

}  // namespace

std::string KernelSpec::name() const {
  return std::visit(overloaded{
                        [](const BallKernel&) { return std::string("ball"); },
                        [](const HalfPlaneKernel&) { return std::string("halfplane"); },
                        [](const ComposedBallKernel&) { return std::string("composed_ball"); },
                        [](const ComposedHalfPlaneKernel&) { return std::string("composed_halfplane"); },
                    },
                    v_);
}

DomainSpec::DomainSpec(Variant v) : v_(std::move(v)) {
  if (const auto* s = std::get_if<SpectralDisk>(&v_)) {
    if (!(s->radius > 0.0)) throw NcError(ErrorKind::InvalidSpec, "spectral disk radius must be positive");
    if (s->bound.rule == NormBound::Rule::Constant && !(s->bound.value > 0.0))
      throw NcError(ErrorKind::InvalidSpec, "norm bound must be positive");
  }
}

const KernelSpec* DomainSpec::kernel() const noexcept {
  const auto* kd = std::get_if<KernelDomain>(&v_);
  return kd ? &kd->kernel : nullptr;
}

std::string DomainSpec::name() const {
  return std::visit(overloaded{
                        [](const KernelDomain& k) { return k.kernel.name(); },
                        [](const SpectralDisk&) { return std::string("spectral_disk"); },
                        [](const NilpotentCone&) { return std::string("nilpotent"); },
                    },
                    v_);
}

CMatrix kernel_eval(const KernelSpec& k, const NcPoint& a, const NcPoint& c, const CMatrix& p) {
  if (a.base_dim() != c.base_dim()) throw NcError(ErrorKind::BaseDimMismatch, "kernel_eval");
  if (p.rows() != a.dim() || p.cols() != c.dim())
    throw NcError(ErrorKind::DimMismatch, "kernel_eval: P must be level(a) x level(c) blocks");
  return std::visit(overloaded{
                        [&](const BallKernel&) { return ball_form(a.mat(), p, c.mat()); },
                        [&](const HalfPlaneKernel&) { return halfplane_form(a.mat(), p, c.mat()); },
                        [&](const ComposedBallKernel& kb) {
                          return ball_form(eval_g(kb.g, a.mat()), p, eval_g(kb.g, c.mat()));
                        },
                        [&](const ComposedHalfPlaneKernel& kh) {
                          return halfplane_form(eval_g(kh.g, a.mat()), p, eval_g(kh.g, c.mat()));
                        },
                    },
                    k.variant());
}

CMatrix kernel_diagonal(const KernelSpec& k, const NcPoint& a) {
  return real_part(kernel_eval(k, a, a, CMatrix::identity(a.dim())));
}

Membership test_membership(const DomainSpec& d, const NcPoint& a, double margin) {
  Membership m;
  try {
    m.inside = std::visit(
        overloaded{
            [&](const KernelDomain& kd) { return is_strictly_positive(kernel_diagonal(kd.kernel, a), margin); },
            [&](const SpectralDisk& s) {
              const double norm = operator_norm(a.mat());
              if (!(norm < s.bound.at(a.level()) * (1.0 - margin))) return false;
              for (const auto& l : eigenvalues(a.mat()))
                if (!(std::abs(l - s.center) < s.radius * (1.0 - margin))) return false;
              return true;
            },
            [&](const NilpotentCone&) {
              const double norm = operator_norm(a.mat());
              if (norm == 0.0) return true;
              const CMatrix scaled = (1.0 / norm) * a.mat();
              return operator_norm(matrix_power(scaled, a.level())) <= 1e-10;
            },
        },
        d.variant());
  } catch (const NcError& e) {
    m.inside = false;
    m.diagnostic = e.what();
  }
  return m;
}

bool contains(const DomainSpec& d, const NcPoint& a, double margin) { return test_membership(d, a, margin).inside; }

KernelDiffs kernel_diffs(const KernelSpec& k, const NcPoint& a, const NcPoint& c, const NcDirection& b) {
  if (a.base_dim() != c.base_dim() || b.base_dim() != a.base_dim())
    throw NcError(ErrorKind::BaseDimMismatch, "kernel_diffs");
  if (b.row_level() != a.level() || b.col_level() != c.level())
    throw NcError(ErrorKind::DimMismatch, "kernel_diffs: b must be level(a) x level(c)");
  const std::size_t d = a.base_dim();
  const std::size_t n = a.dim(), m = c.dim();

  // X = [[a, b], [0, c]] and Y = [[c*, b*], [0, a*]]; K(X, Y*) is the affine kernel at (X, Y).
  const NcPoint x = block_upper(a, b, c);
  const NcPoint y = block_upper(adjoint(c), NcDirection(d, c.level(), a.level(), b.mat().adjoint()), adjoint(a));
  CMatrix p(n + m, m + n);
  p.set_block(n, 0, CMatrix::identity(m));
  const CMatrix g = kernel_eval(k, x, adjoint(y), p);
  return KernelDiffs{g.block(0, 0, n, m), g.block(n, m, m, n), g.block(0, m, n, n)};
}

NcPoint sample_point(const DomainSpec& d, std::size_t base_dim, std::size_t level, CounterRng& rng,
                     double max_norm) {
  const std::size_t dim = base_dim * level;
  const KernelSpec* k = d.kernel();
  if (k && std::holds_alternative<BallKernel>(k->variant())) {
    CMatrix z = random_complex(dim, dim, rng);
    const double nz = operator_norm(z);
    const double target = max_norm * rng.uniform();
    return NcPoint(base_dim, level, (target / nz) * z);
  }
  if (k && std::holds_alternative<HalfPlaneKernel>(k->variant())) {
    const CMatrix re = random_hermitian(dim, rng);
    const CMatrix root = random_complex(dim, dim, rng);
    const CMatrix im = add_identity(0.5 * root * root.adjoint(), rng.uniform(0.2, 1.0));
    return NcPoint(base_dim, level, re + cplx(0.0, 1.0) * im);
  }
  if (const auto* s = std::get_if<SpectralDisk>(&d.variant()); s && base_dim == 1)
    return sample_selfadjoint_in_disk(*s, level, rng);
  throw NcError(ErrorKind::InvalidSpec, "no sampler for domain " + d.name());
}

NcPoint sample_selfadjoint_in_disk(const SpectralDisk& disk, std::size_t level, CounterRng& rng) {
  if (disk.center.imag() != 0.0)
    throw NcError(ErrorKind::InvalidSpec, "self-adjoint sampling needs a real disk center");
  const double lo = disk.center.real() - disk.radius;
  const double hi = disk.center.real() + disk.radius;
  const double bound = disk.bound.at(level);
  // Spectrum in the disk and, for self-adjoints, norm = max |eigenvalue|.
  const double elo = std::max(lo, -bound), ehi = std::min(hi, bound);
  if (!(ehi > elo)) throw NcError(ErrorKind::InvalidSpec, "disk and norm bound leave no self-adjoint points");
  std::vector<cplx> ev(level);
  const double shrink = 1e-6 * (ehi - elo);
  for (auto& e : ev) e = rng.uniform(elo + shrink, ehi - shrink);
  const CMatrix u = random_unitary(level, rng);
  return NcPoint::scalar_level(u * CMatrix::diag(ev) * u.adjoint());
}

NcDirection sample_direction(std::size_t base_dim, std::size_t row_level, std::size_t col_level,
                             CounterRng& rng, double norm) {
  CMatrix z = random_complex(base_dim * row_level, base_dim * col_level, rng);
  const double nz = operator_norm(z);
  return NcDirection(base_dim, row_level, col_level, (norm * rng.uniform(0.05, 1.0) / nz) * z);
}

}  // namespace ncm
