#include "ncmetric/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ncmetric/error.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/parallel.hpp"

namespace ncm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const cplx kI(0.0, 1.0);

bool in_upper_half_plane(const CMatrix& b) { return is_strictly_positive(imag_part(b), 1e-10); }

cplx inner(const CMatrix& x, const CMatrix& y) {
  cplx s = 0.0;
  const auto xd = x.data();
  const auto yd = y.data();
  for (std::size_t i = 0; i < xd.size(); ++i) s += std::conj(xd[i]) * yd[i];
  return s;
}

CMatrix resolvent_inverse(const CMatrix& m) {
  try {
    return inverse(m);
  } catch (const NcError& e) {
    if (e.kind() == ErrorKind::SingularMatrix) throw NcError(ErrorKind::SingularResolvent, e.what());
    throw;
  }
}

// ∫ (b − s)^{-1} dμ(s) for laws supported on [−2r, 2r] parametrized by s = 2r cos θ.
CMatrix quadrature_resolvent(const CMatrix& b, double r, bool semicircle) {
  const auto& gl = gauss_legendre_256();
  const std::size_t n = b.rows();
  CMatrix acc(n, n);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double theta = 0.5 * std::numbers::pi * (gl.nodes[i] + 1.0);
    const double s = 2.0 * r * std::cos(theta);
    // semicircle: (2/π) sin²θ dθ; arcsine: (1/π) dθ; dθ = (π/2) dx.
    const double w = semicircle ? gl.weights[i] * std::pow(std::sin(theta), 2) : 0.5 * gl.weights[i];
    acc += w * resolvent_inverse(add_identity(b, -s));
  }
  return acc;
}

cplx scalar_closed_G(const ScalarLaw& law, cplx z) {
  switch (law.kind) {
    case ScalarLawKind::Semicircle: {
      const double sigma = std::sqrt(law.variance);
      return (z - std::sqrt(z - 2.0 * sigma) * std::sqrt(z + 2.0 * sigma)) / (2.0 * law.variance);
    }
    case ScalarLawKind::Bernoulli: return z / (z * z - 1.0);
    case ScalarLawKind::Arcsine: return 1.0 / (std::sqrt(z - 2.0) * std::sqrt(z + 2.0));
    case ScalarLawKind::PointMass: return 1.0 / (z - law.alpha);
  }
  return 0.0;
}

CMatrix scalar_law_G(const ScalarLaw& law, const CMatrix& b) {
  const std::size_t n = b.rows();
  if (n == 1 && b(0, 0).imag() > 0.0) return CMatrix::scalar(scalar_closed_G(law, b(0, 0)));
  switch (law.kind) {
    case ScalarLawKind::PointMass: return resolvent_inverse(add_identity(b, -law.alpha));
    case ScalarLawKind::Bernoulli:
      return 0.5 * (resolvent_inverse(add_identity(b, -1.0)) + resolvent_inverse(add_identity(b, 1.0)));
    case ScalarLawKind::Semicircle: return quadrature_resolvent(b, std::sqrt(law.variance), true);
    case ScalarLawKind::Arcsine: return quadrature_resolvent(b, 1.0, false);
  }
  return CMatrix(n, n);
}

void require_point(const OperatorValuedModel& model, const NcPoint& b) {
  if (b.base_dim() != model.base_dim())
    throw NcError(ErrorKind::BaseDimMismatch, "point base_dim must match the model's B");
  if (!in_subalgebra(model, b.mat()))
    throw NcError(ErrorKind::InvalidSpec, "point is not in the subalgebra B");
}

CMatrix amplify_to(const NcPoint& b0, std::size_t dim) {
  if (b0.dim() == dim) return b0.mat();
  if (dim % b0.dim() != 0) throw NcError(ErrorKind::DimMismatch, "cannot amplify b0 to this level");
  return kron(CMatrix::identity(dim / b0.dim()), b0.mat());
}

CMatrix h0_unchecked(const H0Map& h0, const NcPoint& w) {
  return amplify_to(h0.b0, w.dim()) + rho_minus_id(h0.rho, h_unchecked(h0.model, w), w.base_dim());
}

}  // namespace

OperatorValuedModel::OperatorValuedModel(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const MatrixModel& m) {
                   if (!m.x.is_square() || m.x.rows() == 0)
                     throw NcError(ErrorKind::InvalidSpec, "model X must be a nonempty square matrix");
                   if (!is_hermitian(m.x)) throw NcError(ErrorKind::NonHermitianInput, "model X");
                   if (m.blocks.empty() || std::any_of(m.blocks.begin(), m.blocks.end(), [](auto k) { return k == 0; }))
                     throw NcError(ErrorKind::InvalidSpec, "block sizes must be positive");
                   if (std::accumulate(m.blocks.begin(), m.blocks.end(), std::size_t{0}) != m.x.rows())
                     throw NcError(ErrorKind::InvalidSpec, "block sizes must sum to the dimension of X");
                 },
                 [](const ScalarLaw& l) {
                   if (l.kind == ScalarLawKind::Semicircle && !(l.variance > 0.0))
                     throw NcError(ErrorKind::InvalidSpec, "semicircle variance must be positive");
                   if (!std::isfinite(l.alpha)) throw NcError(ErrorKind::InvalidSpec, "point mass location");
                 },
             },
             v_);
}

std::size_t OperatorValuedModel::base_dim() const noexcept {
  if (const auto* m = std::get_if<MatrixModel>(&v_)) return m->x.rows();
  return 1;
}

std::string OperatorValuedModel::name() const {
  if (std::holds_alternative<MatrixModel>(v_)) return "matrix";
  switch (std::get<ScalarLaw>(v_).kind) {
    case ScalarLawKind::Semicircle: return "semicircle";
    case ScalarLawKind::Bernoulli: return "bernoulli";
    case ScalarLawKind::Arcsine: return "arcsine";
    case ScalarLawKind::PointMass: return "point_mass";
  }
  return "unknown";
}

CpMapSpec::CpMapSpec(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const ScalarPower& p) {
                   if (!(p.t >= 1.0)) throw NcError(ErrorKind::InvalidSpec, "scalar power needs t >= 1");
                 },
                 [](const KrausAugment& k) {
                   for (const auto& v : k.v)
                     if (!v.is_square()) throw NcError(ErrorKind::NotSquare, "Kraus operators must be square");
                 },
             },
             v_);
}

CMatrix expectation(const MatrixModel& m, const CMatrix& big) {
  const std::size_t d = m.x.rows();
  if (!big.is_square() || big.rows() % d != 0) throw NcError(ErrorKind::DimMismatch, "expectation");
  const std::size_t n = big.rows() / d;
  CMatrix out(big.rows(), big.cols());
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      std::size_t off = 0;
      for (std::size_t k : m.blocks) {
        const std::size_t r0 = p * d + off, c0 = q * d + off;
        if (m.expectation == ExpectationKind::Compression) {
          out.set_block(r0, c0, big.block(r0, c0, k, k));
        } else {
          const cplx tr = big.block(r0, c0, k, k).trace() / static_cast<double>(k);
          for (std::size_t i = 0; i < k; ++i) out(r0 + i, c0 + i) = tr;
        }
        off += k;
      }
    }
  }
  return out;
}

bool in_subalgebra(const OperatorValuedModel& model, const CMatrix& b, double tol) {
  const auto* m = std::get_if<MatrixModel>(&model.variant());
  if (!m) return true;
  return max_abs_diff(expectation(*m, b), b) <= tol * std::max(1.0, b.max_abs());
}

CMatrix cauchy_G_unchecked(const OperatorValuedModel& model, const NcPoint& b) {
  if (b.base_dim() != model.base_dim()) throw NcError(ErrorKind::BaseDimMismatch, "cauchy_G");
  return std::visit(overloaded{
                        [&](const MatrixModel& m) {
                          const CMatrix shifted = b.mat() - kron(CMatrix::identity(b.level()), m.x);
                          return expectation(m, resolvent_inverse(shifted));
                        },
                        [&](const ScalarLaw& l) { return scalar_law_G(l, b.mat()); },
                    },
                    model.variant());
}

NcPoint cauchy_G(const OperatorValuedModel& model, const NcPoint& b) {
  require_point(model, b);
  if (!in_upper_half_plane(b.mat())) throw NcError(ErrorKind::NotInHalfPlane, "cauchy_G needs Im b > 0");
  CMatrix g = cauchy_G_unchecked(model, b);
  if (!is_strictly_positive(-imag_part(g), 0.0))
    throw NcError(ErrorKind::EvaluationFailure, "Im G is not negative definite");
  return NcPoint(b.base_dim(), b.level(), std::move(g));
}

FH F_and_h(const OperatorValuedModel& model, const NcPoint& b) {
  const NcPoint g = cauchy_G(model, b);
  CMatrix f = resolvent_inverse(g.mat());
  CMatrix h = f - b.mat();
  const double slack = 1e-9 * std::max(1.0, operator_norm(f));
  if (min_eigenvalue(imag_part(h)) < -slack)
    throw NcError(ErrorKind::EvaluationFailure, "Im h is not positive semidefinite");
  return FH{NcPoint(b.base_dim(), b.level(), std::move(f)), NcPoint(b.base_dim(), b.level(), std::move(h))};
}

CMatrix h_unchecked(const OperatorValuedModel& model, const NcPoint& b) {
  return resolvent_inverse(cauchy_G_unchecked(model, b)) - b.mat();
}

CMatrix rho_minus_id(const CpMapSpec& rho, const CMatrix& w, std::size_t base_dim) {
  return std::visit(overloaded{
                        [&](const ScalarPower& p) { return (p.t - 1.0) * w; },
                        [&](const KrausAugment& k) {
                          CMatrix acc(w.rows(), w.cols());
                          for (const auto& v : k.v) {
                            if (v.rows() != base_dim)
                              throw NcError(ErrorKind::DimMismatch, "Kraus operator size must equal base_dim");
                            const CMatrix big = kron(CMatrix::identity(w.rows() / base_dim), v);
                            acc += big.adjoint() * w * big;
                          }
                          return acc;
                        },
                    },
                    rho.variant());
}

Subordination subordination_solve(const OperatorValuedModel& model, const CpMapSpec& rho, const NcPoint& b,
                                  const SolveOptions& opts) {
  require_point(model, b);
  if (!in_upper_half_plane(b.mat())) throw NcError(ErrorKind::NotInHalfPlane, "subordination needs Im b > 0");
  const std::size_t d = b.base_dim(), level = b.level();
  auto as_point = [&](const CMatrix& m) { return NcPoint(d, level, m); };
  auto map = [&](const CMatrix& w) { return b.mat() + rho_minus_id(rho, h_unchecked(model, as_point(w)), d); };

  SolveTrace tr;
  std::vector<CMatrix> iterates;
  CMatrix w = b.mat();
  CMatrix tw = map(w);
  CMatrix dv = tw - w;
  double r = dv.frobenius_norm();
  tr.eps0 = min_eigenvalue(imag_part(b.mat()));
  tr.eps0_visited = min_eigenvalue(imag_part(tw));
  tr.residuals.push_back(r);
  iterates.push_back(w);
  CMatrix best = w;
  double best_r = r;

  std::optional<CMatrix> w_prev, d_prev;
  double halving_alpha = 1.0;
  constexpr double kAlphaCap = 100.0;

  while (r >= opts.tol && tr.residuals.size() < opts.max_iter) {
    cplx alpha = 1.0;
    // Plain steps already contract by 1 − ε₀||(Im w)^{-1}|| when that factor is small.
    const double plain_factor = 1.0 - tr.eps0 / min_eigenvalue(imag_part(w));
    if (opts.damping == DampingRule::Secant && plain_factor > 0.5) {
      if (w_prev) {
        const CMatrix dw = w - *w_prev;
        const CMatrix dd = dv - *d_prev;
        const cplx mu = inner(dw, dd) / inner(dw, dw).real();
        if (std::abs(mu) > 0.0 && std::isfinite(std::abs(mu))) alpha = -1.0 / mu;
        if (std::abs(alpha) > kAlphaCap) alpha *= kAlphaCap / std::abs(alpha);
      }
    } else {
      alpha = halving_alpha;
    }

    CMatrix wn = w + alpha * dv;
    if (!in_upper_half_plane(wn)) {
      double real_step = std::min(1.0, std::abs(alpha));
      wn = w + real_step * dv;
      for (int k = 0; k < 60 && !in_upper_half_plane(wn); ++k) {
        real_step *= 0.5;
        wn = w + real_step * dv;
      }
      if (!in_upper_half_plane(wn)) break;
    }
    CMatrix tn;
    try {
      tn = map(wn);
    } catch (const NcError&) {
      break;
    }
    CMatrix dn = tn - wn;
    const double rn = dn.frobenius_norm();
    tr.residuals.push_back(rn);

    if (opts.damping == DampingRule::Halving && rn > r) {
      halving_alpha *= 0.5;
      continue;
    }
    halving_alpha = 1.0;
    w_prev = w;
    d_prev = dv;
    w = std::move(wn);
    dv = std::move(dn);
    r = rn;
    tr.eps0_visited = std::min(tr.eps0_visited, min_eigenvalue(imag_part(tn)));
    iterates.push_back(w);
    if (r < best_r) {
      best_r = r;
      best = w;
    }
  }

  tr.converged = r < opts.tol;
  tr.iterations = tr.residuals.size();
  if (!tr.converged) {
    w = best;
    r = best_r;
  }
  tr.residual = r;
  for (std::size_t i = 1; i < tr.residuals.size(); ++i)
    tr.ratios.push_back(tr.residuals[i - 1] > 0.0 ? tr.residuals[i] / tr.residuals[i - 1] : 0.0);
  const std::size_t tail = std::min<std::size_t>(10, tr.ratios.size());
  if (tail > 0) {
    double log_sum = 0.0;
    for (std::size_t i = tr.ratios.size() - tail; i < tr.ratios.size(); ++i)
      log_sum += std::log(std::max(tr.ratios[i], 1e-300));
    tr.tail_ratio = std::exp(log_sum / static_cast<double>(tail));
  }
  const NcPoint omega = as_point(w);
  const CMatrix im_w = imag_part(w);
  tr.theoretical_factor = 1.0 - tr.eps0 / min_eigenvalue(im_w);
  tr.provable_factor = 1.0 - tr.eps0 / max_eigenvalue(im_w);
  for (const auto& it : iterates) tr.gauges.push_back(halfplane_gauge(as_point(it), omega));

  if (!tr.converged && opts.throw_on_failure)
    throw NcError(ErrorKind::MaxIterExceeded, "subordination residual " + std::to_string(r) + " after " +
                                                  std::to_string(tr.iterations) + " iterations");
  return Subordination{omega, std::move(tr)};
}

NcPoint convolved_G(const OperatorValuedModel& model, const CpMapSpec& rho, const NcPoint& b,
                    const SolveOptions& opts) {
  return cauchy_G(model, subordination_solve(model, rho, b, opts).omega);
}

namespace {

double state_value(const OperatorValuedModel& model, const CMatrix& g, const StateSpec& state) {
  const std::size_t d = model.base_dim();
  if (!state.block) return (g.trace() / static_cast<double>(d)).imag();
  const auto* m = std::get_if<MatrixModel>(&model.variant());
  if (!m || *state.block >= m->blocks.size()) throw NcError(ErrorKind::InvalidSpec, "state block out of range");
  std::size_t off = 0;
  for (std::size_t i = 0; i < *state.block; ++i) off += m->blocks[i];
  const std::size_t k = m->blocks[*state.block];
  return (g.block(off, off, k, k).trace() / static_cast<double>(k)).imag();
}

}  // namespace

std::vector<DensityRow> density_grid(const OperatorValuedModel& model, const CpMapSpec& rho, double xmin,
                                     double xmax, double eps, std::size_t points, const StateSpec& state,
                                     const SolveOptions& opts) {
  if (!(eps > 0.0)) throw NcError(ErrorKind::InvalidSpec, "eps must be positive");
  if (points < 2 || !(xmax > xmin)) throw NcError(ErrorKind::InvalidSpec, "grid needs xmax > xmin and >= 2 points");
  std::vector<DensityRow> rows(points);
  SolveOptions local = opts;
  local.throw_on_failure = false;
  const std::size_t d = model.base_dim();
  parallel_for(points, [&](std::size_t i) {
    DensityRow& row = rows[i];
    row.x = xmin + (xmax - xmin) * static_cast<double>(i) / static_cast<double>(points - 1);
    try {
      const NcPoint b(d, 1, CMatrix::identity(d) * cplx(row.x, eps));
      const Subordination s = subordination_solve(model, rho, b, local);
      row.residual = s.trace.residual;
      row.iterations = s.trace.iterations;
      row.tail_ratio = s.trace.tail_ratio;
      row.theoretical_factor = s.trace.theoretical_factor;
      row.converged = s.trace.converged;
      if (!row.converged) row.error = "MaxIterExceeded";
      row.density = -state_value(model, cauchy_G(model, s.omega).mat(), state) / std::numbers::pi;
    } catch (const NcError& e) {
      row.error = e.what();
      row.density = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return rows;
}

double total_mass(const std::vector<DensityRow>& rows) {
  double m = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    m += 0.5 * (rows[i].density + rows[i - 1].density) * (rows[i].x - rows[i - 1].x);
  return m;
}

CMatrix H0Map::operator()(const NcPoint& w) const {
  if (!in_upper_half_plane(w.mat())) throw NcError(ErrorKind::NotInHalfPlane, "h0 needs Im w > 0");
  return amplify_to(b0, w.dim()) + rho_minus_id(rho, F_and_h(model, w).h.mat(), w.base_dim());
}

double H0Map::eps0() const { return min_eigenvalue(imag_part(b0.mat())); }

NcPoint k0(const H0Map& h0, const NcPoint& a) {
  const NcPoint w(a.base_dim(), a.level(), -inverse(a.mat()));
  return NcPoint(a.base_dim(), a.level(), -inverse(h0(w)));
}

K0FixedPoint k0_fixed_point(const H0Map& h0, const NcPoint& a, const K0Options& opts) {
  const CMatrix ia = imag_part(a.mat());
  if (opts.experimental) {
    if (min_eigenvalue(ia) < -1e-12) throw NcError(ErrorKind::NotInHalfPlane, "Im a must be >= 0");
  } else if (!is_strictly_positive(ia, 1e-10)) {
    throw NcError(ErrorKind::NotInHalfPlane, "fixed point needs Im a > 0 (see the experimental flag)");
  }
  K0FixedPoint out{a, 0, 0.0, h0.eps0(), -std::numeric_limits<double>::infinity()};
  if (!(out.eps0 > 0.0)) throw NcError(ErrorKind::NotInHalfPlane, "b0 must satisfy Im b0 > 0");
  const double radius = 1.0 / (2.0 * out.eps0);
  const CMatrix center = CMatrix::identity(a.dim()) * cplx(0.0, radius);
  auto step = [&](const NcPoint& x) {
    const NcPoint k = k0(h0, x);
    const double excess = operator_norm(k.mat() - center) - radius;
    out.range_excess = std::max(out.range_excess, excess);
    if (excess > 1e-9 * std::max(1.0, radius))
      throw NcError(ErrorKind::RangeViolation, "k0 left the ball centered at i/(2 eps0)");
    return NcPoint(a.base_dim(), a.level(), a.mat() + k.mat());
  };
  const std::size_t max_iter = opts.experimental ? 10 * opts.max_iter : opts.max_iter;
  NcPoint x = step(NcPoint(a.base_dim(), a.level(), add_identity(a.mat(), kI)));
  for (std::size_t it = 1; it <= max_iter; ++it) {
    NcPoint next = step(x);
    out.residual = (next.mat() - x.mat()).frobenius_norm();
    out.iterations = it;
    x = std::move(next);
    if (out.residual < opts.tol) {
      out.x = x;
      return out;
    }
  }
  throw NcError(ErrorKind::MaxIterExceeded, "x = a + k0(x) did not converge");
}

double halfplane_gauge(const NcPoint& a, const NcPoint& c) {
  if (a.base_dim() != c.base_dim() || a.level() != c.level())
    throw NcError(ErrorKind::DimMismatch, "halfplane_gauge needs points at a common level");
  const CMatrix ia = imag_part(a.mat()), ic = imag_part(c.mat());
  if (!is_strictly_positive(ia, 0.0) || !is_strictly_positive(ic, 0.0))
    throw NcError(ErrorKind::NotInHalfPlane, "halfplane_gauge");
  return operator_norm(psd_inv_sqrt(ia) * (a.mat() - c.mat()) * psd_inv_sqrt(ic));
}

StrictContraction h0_strict_contraction(const H0Map& h0, const NcPoint& a, const NcPoint& c, const NcDirection& b) {
  if (!in_subalgebra(h0.model, a.mat()) || !in_subalgebra(h0.model, c.mat()) ||
      !in_subalgebra(h0.model, block_upper(a, b, c).mat()))
    throw NcError(ErrorKind::InvalidSpec, "a, c and b must lie in B");
  const CMatrix ha = h0(a), hc = h0(c);
  const CMatrix big = h0_unchecked(h0, block_upper(a, b, c));
  const CMatrix dh = big.block(0, a.dim(), a.dim(), c.dim());
  const CMatrix iha = imag_part(ha), ihc = imag_part(hc);
  const double eps0 = h0.eps0();
  StrictContraction out;
  out.lhs = std::pow(operator_norm(psd_inv_sqrt(iha) * dh * psd_inv_sqrt(ihc)), 2);
  const double gauge =
      operator_norm(psd_inv_sqrt(imag_part(a.mat())) * b.mat() * psd_inv_sqrt(imag_part(c.mat())));
  out.rhs = gauge * gauge * (1.0 - eps0 / min_eigenvalue(iha)) * (1.0 - eps0 / min_eigenvalue(ihc));
  out.rhs_provable = gauge * gauge * (1.0 - eps0 / max_eigenvalue(iha)) * (1.0 - eps0 / max_eigenvalue(ihc));
  return out;
}

const GaussLegendre& gauss_legendre_256() {
  static const GaussLegendre rule = [] {
    constexpr std::size_t n = 256;
    GaussLegendre g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      g.nodes[i] = x;
      g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
  }();
  return rule;
}

}  // namespace ncm
