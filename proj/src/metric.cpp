#include "ncmetric/metric.hpp"

#include <algorithm>
#include <cmath>

#include "ncmetric/error.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/rng.hpp"

namespace ncm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_inside(const DomainSpec& d, const NcPoint& p, const char* what) {
  if (!contains(d, p)) throw NcError(ErrorKind::PointOutsideDomain, std::string(what) + " not in " + d.name());
}

double clipped_root_of_top(const CMatrix& q) {
  const double top = max_eigenvalue(real_part(q));
  return std::sqrt(std::max(0.0, top));
}

// (K(a,a)(I) Hermitian part)^{-1/2}, or PointOutsideDomain.
CMatrix diagonal_inv_sqrt(const KernelSpec& k, const NcPoint& p, const char* what) {
  const CMatrix g = kernel_diagonal(k, p);
  if (!is_strictly_positive(g)) throw NcError(ErrorKind::PointOutsideDomain, std::string(what) + " outside kernel domain");
  return psd_inv_sqrt(g);
}

}  // namespace

std::string to_string(DeltaMethod m) {
  switch (m) {
    case DeltaMethod::Ray: return "ray";
    case DeltaMethod::ClosedBall: return "closed_ball";
    case DeltaMethod::ClosedHalfPlane: return "closed_halfplane";
    case DeltaMethod::Kernel: return "kernel";
  }
  return "unknown";
}

DeltaResult delta_ray(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const NcDirection& b, double tol,
                      double margin) {
  require_inside(d, a, "a");
  require_inside(d, c, "c");
  if (!(tol > 0.0)) throw NcError(ErrorKind::InvalidSpec, "ray tolerance must be positive");
  DeltaResult r;
  r.method = DeltaMethod::Ray;
  if (b.mat().max_abs() == 0.0) {
    block_upper(a, b, c);  // dimension check
    return r;
  }
  auto member = [&](double s) {
    ++r.iterations;
    return contains(d, block_upper(a, b.scaled(s), c), margin);
  };

  double lo = 0.0, hi = 0.0;  // lo inside, hi outside
  if (member(1.0)) {
    lo = 1.0;
    for (;;) {
      const double next = 2.0 * lo;
      if (next > kRayCap) {
        r.value = 0.0;
        r.bracket_lo = 0.0;
        r.bracket_hi = 1.0 / lo;
        r.zero_within_cap = true;
        return r;
      }
      if (!member(next)) {
        hi = next;
        break;
      }
      lo = next;
    }
  } else {
    hi = 1.0;
    for (;;) {
      const double next = 0.5 * hi;
      if (next < kRayFloor) {
        r.value = kInf;
        r.bracket_lo = 1.0 / hi;
        r.bracket_hi = kInf;
        return r;
      }
      if (member(next)) {
        lo = next;
        break;
      }
      hi = next;
    }
  }

  while (1.0 / lo - 1.0 / hi > tol * std::max(1.0, 0.5 * (1.0 / lo + 1.0 / hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (member(mid) ? lo : hi) = mid;
  }
  r.bracket_lo = 1.0 / hi;
  r.bracket_hi = 1.0 / lo;
  r.value = 0.5 * (r.bracket_lo + r.bracket_hi);
  return r;
}

DeltaResult delta_closed(ClosedKind kind, const NcPoint& a, const NcPoint& c, const NcDirection& b) {
  block_upper(a, b, c);
  DeltaResult r;
  if (kind == ClosedKind::Ball) {
    r.method = DeltaMethod::ClosedBall;
    const CMatrix la = add_identity(-(a.mat() * a.mat().adjoint()), 1.0);
    const CMatrix rc = add_identity(-(c.mat().adjoint() * c.mat()), 1.0);
    if (!is_strictly_positive(real_part(la)) || !is_strictly_positive(real_part(rc)))
      throw NcError(ErrorKind::PointOutsideDomain, "closed ball form needs ||a||, ||c|| < 1");
    r.value = operator_norm(psd_inv_sqrt(real_part(la)) * b.mat() * psd_inv_sqrt(real_part(rc)));
  } else {
    r.method = DeltaMethod::ClosedHalfPlane;
    const CMatrix ia = imag_part(a.mat()), ic = imag_part(c.mat());
    if (!is_strictly_positive(ia) || !is_strictly_positive(ic))
      throw NcError(ErrorKind::PointOutsideDomain, "closed half-plane form needs Im a, Im c > 0");
    r.value = 0.5 * operator_norm(psd_inv_sqrt(ia) * b.mat() * psd_inv_sqrt(ic));
  }
  r.bracket_lo = r.bracket_hi = r.value;
  return r;
}

DeltaResult delta_kernel(const KernelSpec& k, const NcPoint& a, const NcPoint& c, const NcDirection& b) {
  const CMatrix sa = diagonal_inv_sqrt(k, a, "a");
  const CMatrix gc = kernel_diagonal(k, c);
  if (!is_strictly_positive(gc)) throw NcError(ErrorKind::PointOutsideDomain, "c outside kernel domain");
  const KernelDiffs diffs = kernel_diffs(k, a, c, b);
  const CMatrix inner = right_divide(diffs.d0, gc) * diffs.d1 - diffs.d01;
  DeltaResult r;
  r.method = DeltaMethod::Kernel;
  r.value = clipped_root_of_top(sa * inner * sa);
  r.bracket_lo = r.bracket_hi = r.value;
  return r;
}

DeltaResult delta_auto(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const NcDirection& b, double tol) {
  if (const KernelSpec* k = d.kernel()) return delta_kernel(*k, a, c, b);
  return delta_ray(d, a, c, b, tol);
}

DeltaResult delta_tilde(const KernelSpec& k, const NcPoint& a, const NcPoint& c) {
  if (a.level() != c.level() || a.base_dim() != c.base_dim())
    throw NcError(ErrorKind::DimMismatch, "delta_tilde needs points at a common level");
  return delta_kernel(k, a, c, NcDirection::difference(a, c));
}

DeltaResult delta_tilde_closed(const KernelSpec& k, const NcPoint& a, const NcPoint& c) {
  if (a.level() != c.level() || a.base_dim() != c.base_dim())
    throw NcError(ErrorKind::DimMismatch, "delta_tilde needs points at a common level");
  const CMatrix sa = diagonal_inv_sqrt(k, a, "a");
  const CMatrix gc = kernel_diagonal(k, c);
  if (!is_strictly_positive(gc)) throw NcError(ErrorKind::PointOutsideDomain, "c outside kernel domain");
  const CMatrix id = CMatrix::identity(a.dim());
  const CMatrix kac = kernel_eval(k, a, c, id);
  const CMatrix kca = kernel_eval(k, c, a, id);
  const CMatrix op = add_identity(sa * right_divide(kac, gc) * kca * sa, -1.0);
  DeltaResult r;
  r.method = DeltaMethod::Kernel;
  r.value = clipped_root_of_top(op);
  r.bracket_lo = r.bracket_hi = r.value;
  return r;
}

DeltaResult delta_tilde(const DomainSpec& d, const NcPoint& a, const NcPoint& c, double tol) {
  if (const KernelSpec* k = d.kernel()) {
    require_inside(d, a, "a");
    require_inside(d, c, "c");
    return delta_tilde(*k, a, c);
  }
  return delta_ray(d, a, c, NcDirection::difference(a, c), tol);
}

// ---------------------------------------------------------------- divisions

namespace {

NcPoint lerp(const NcPoint& a, const NcPoint& c, double t) {
  return NcPoint(a.base_dim(), a.level(), (1.0 - t) * a.mat() + t * c.mat());
}

struct DivisionEval {
  const DomainSpec& d;
  double tol;
  std::size_t evals = 0;

  double step(const NcPoint& p, const NcPoint& q) {
    ++evals;
    return delta_tilde(d, p, q, tol).value;
  }

  double total(const std::vector<NcPoint>& pts) {
    double s = 0.0;
    for (std::size_t j = 1; j < pts.size(); ++j) s += step(pts[j - 1], pts[j]);
    return s;
  }
};

// Tries to move a blocked division point back inside by small random displacements.
bool repair(const DomainSpec& d, NcPoint& p, double scale, CounterRng& rng) {
  for (int attempt = 0; attempt < 12; ++attempt) {
    const double s = scale * std::pow(0.5, attempt / 3);
    CMatrix dir = random_complex(p.dim(), p.dim(), rng);
    dir *= cplx(s / std::max(1e-300, operator_norm(dir)));
    NcPoint trial(p.base_dim(), p.level(), p.mat() + dir);
    if (contains(d, trial)) {
      p = trial;
      return true;
    }
  }
  return false;
}

}  // namespace

DivisionBound dtilde_upper(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const DivisionOptions& opts) {
  if (a.level() != c.level() || a.base_dim() != c.base_dim())
    throw NcError(ErrorKind::DimMismatch, "dtilde_upper needs points at a common level");
  require_inside(d, a, "a");
  require_inside(d, c, "c");

  DivisionBound out;
  DivisionEval ev{d, opts.ray_tol};
  CounterRng rng(opts.seed, 0xD1F1);
  out.value = kInf;
  const double span = operator_norm(a.mat() - c.mat());
  if (span == 0.0) {
    out.value = 0.0;
    out.division = {a, c};
    out.level_values = {0.0};
    out.running_min = {0.0};
    return out;
  }

  std::size_t blocked_levels = 0;
  for (std::size_t k = 0; k <= opts.refinements; ++k) {
    const std::size_t segments = std::size_t{1} << k;
    std::vector<NcPoint> pts;
    pts.reserve(segments + 1);
    bool blocked = false;
    for (std::size_t j = 0; j <= segments; ++j) {
      NcPoint p = lerp(a, c, static_cast<double>(j) / static_cast<double>(segments));
      if (j > 0 && j < segments && !contains(d, p) &&
          !repair(d, p, 0.25 * span / static_cast<double>(segments), rng)) {
        blocked = true;
        break;
      }
      pts.push_back(std::move(p));
    }
    double value = kInf;
    if (!blocked) {
      try {
        value = ev.total(pts);
      } catch (const NcError&) {
        blocked = true;
      }
    }
    if (blocked) ++blocked_levels;
    out.level_values.push_back(value);
    out.running_min.push_back(std::min(value, out.running_min.empty() ? kInf : out.running_min.back()));
    if (value < out.value) {
      out.value = value;
      out.division = std::move(pts);
    }
  }

  out.after_perturbation = out.value;
  if (std::isfinite(out.value) && opts.perturbation_budget > 0 && out.division.size() > 2) {
    auto& pts = out.division;
    std::vector<double> steps(pts.size() - 1);
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) steps[j] = ev.step(pts[j], pts[j + 1]);
    double scale = 0.25 * span / static_cast<double>(pts.size() - 1);
    const std::size_t budget_end = ev.evals + opts.perturbation_budget;
    while (ev.evals + 2 <= budget_end && scale > 1e-10 * span) {
      bool improved = false;
      for (std::size_t j = 1; j + 1 < pts.size() && ev.evals + 2 <= budget_end; ++j) {
        CMatrix dir = random_complex(pts[j].dim(), pts[j].dim(), rng);
        dir *= cplx(scale / std::max(1e-300, operator_norm(dir)));
        for (double sign : {1.0, -1.0}) {
          if (ev.evals + 2 > budget_end) break;
          NcPoint trial(pts[j].base_dim(), pts[j].level(), pts[j].mat() + sign * dir);
          if (!contains(d, trial)) continue;
          try {
            const double left = ev.step(pts[j - 1], trial);
            const double right = ev.step(trial, pts[j + 1]);
            if (left + right < steps[j - 1] + steps[j] - 1e-15) {
              pts[j] = trial;
              steps[j - 1] = left;
              steps[j] = right;
              improved = true;
              break;
            }
          } catch (const NcError&) {
          }
        }
      }
      if (!improved) scale *= 0.5;
    }
    double total = 0.0;
    for (double s : steps) total += s;
    out.after_perturbation = total;
    out.value = std::min(out.value, total);
  }

  out.evaluations = ev.evals;
  if (blocked_levels > 0)
    out.diagnostic = std::to_string(blocked_levels) + " straight-line division level(s) left the domain";
  if (!std::isfinite(out.value)) {
    out.diagnostic = "every explored division left the domain";
    out.division = {a, c};
  }
  return out;
}

// ---------------------------------------------------------------- paths

Path::Path(std::vector<PathSample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw NcError(ErrorKind::InvalidSpec, "path needs at least two samples");
  if (samples_.front().t != 0.0 || samples_.back().t != 1.0)
    throw NcError(ErrorKind::InvalidSpec, "path parameter must run from 0 to 1");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t))
      throw NcError(ErrorKind::InvalidSpec, "path parameter must be strictly increasing");
    if (samples_[i].point.level() != samples_[0].point.level() ||
        samples_[i].point.base_dim() != samples_[0].point.base_dim())
      throw NcError(ErrorKind::DimMismatch, "path samples must share level and base_dim");
  }
}

Path Path::straight(const NcPoint& a, const NcPoint& c) { return Path({{0.0, a}, {1.0, c}}); }

std::size_t Path::segment(double t) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double v, const PathSample& s) { return v < s.t; });
  const std::size_t idx = static_cast<std::size_t>(it - samples_.begin());
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, samples_.size() - 2);
}

NcPoint Path::at(double t) const {
  const std::size_t i = segment(t);
  const auto& p = samples_[i];
  const auto& q = samples_[i + 1];
  return lerp(p.point, q.point, (t - p.t) / (q.t - p.t));
}

NcDirection Path::derivative(double t) const {
  const std::size_t i = segment(t);
  const auto& p = samples_[i];
  const auto& q = samples_[i + 1];
  return NcDirection::difference(q.point, p.point).scaled(1.0 / (q.t - p.t));
}

PathBound d_upper(const DomainSpec& d, const Path& path, std::size_t quad_points, double ray_tol) {
  if (quad_points < 2) throw NcError(ErrorKind::InvalidSpec, "need at least two quadrature points");
  for (const auto& s : path.samples())
    if (!contains(d, s.point)) throw NcError(ErrorKind::PathBlocked, "path sample outside " + d.name());

  auto integrand = [&](double t) {
    const NcPoint p = path.at(t);
    try {
      return delta_auto(d, p, p, path.derivative(t), ray_tol).value;
    } catch (const NcError& e) {
      if (e.kind() == ErrorKind::PointOutsideDomain)
        throw NcError(ErrorKind::PathBlocked, "path leaves " + d.name() + " at t=" + std::to_string(t));
      throw;
    }
  };
  auto midpoint = [&](std::size_t q) {
    double s = 0.0;
    for (std::size_t i = 0; i < q; ++i) s += integrand((static_cast<double>(i) + 0.5) / static_cast<double>(q));
    return s / static_cast<double>(q);
  };
  PathBound out;
  out.quad_points = quad_points;
  out.value = midpoint(quad_points);
  out.quadrature_error = std::abs(out.value - midpoint(quad_points / 2));
  return out;
}

// ---------------------------------------------------------------- comparisons

ContractionReport check_contraction(const NcFunctionSpec& f, const DomainSpec& src, const DomainSpec& dst,
                                    const std::vector<ContractionSample>& samples, double ray_tol) {
  ContractionReport rep;
  for (const auto& s : samples) {
    const NcPoint fa = eval(f, s.a);
    const NcPoint fc = eval(f, s.c);
    if (!contains(dst, fa) || !contains(dst, fc))
      throw NcError(ErrorKind::MappingViolation, "f maps a sample outside " + dst.name());
    const double rhs = delta_auto(src, s.a, s.c, s.b, ray_tol).value;
    const double lhs = delta_auto(dst, fa, fc, delta_f(f, s.a, s.c, s.b), ray_tol).value;
    rep.max_excess = std::max(rep.max_excess, lhs - rhs);
    rep.max_abs_gap = std::max(rep.max_abs_gap, std::abs(lhs - rhs));
    ++rep.count;
  }
  return rep;
}

NestingReport compare_nested(const DomainSpec& inner, const DomainSpec& outer, double norm_bound, double gap,
                             const std::vector<std::pair<NcPoint, NcPoint>>& samples, std::uint64_t seed) {
  if (!(norm_bound > 0.0) || !(gap > 0.0))
    throw NcError(ErrorKind::NestingViolation, "nesting needs a positive norm bound and a positive gap");
  NestingReport rep;
  rep.k = norm_bound / (gap + norm_bound);
  CounterRng rng(seed, 0x4E57);
  auto validate = [&](const NcPoint& p) {
    if (!contains(inner, p)) throw NcError(ErrorKind::NestingViolation, "sample outside the inner domain");
    if (operator_norm(p.mat()) > norm_bound * (1.0 + 1e-12))
      throw NcError(ErrorKind::NestingViolation, "sample exceeds the stated norm bound");
    for (int probe = 0; probe < 4; ++probe) {
      CMatrix dir = random_complex(p.dim(), p.dim(), rng);
      dir *= cplx(0.999 * gap / operator_norm(dir));
      if (!contains(outer, NcPoint(p.base_dim(), p.level(), p.mat() + dir)))
        throw NcError(ErrorKind::NestingViolation, "stated gap to the outer complement is too large");
    }
  };
  for (const auto& [a, c] : samples) {
    validate(a);
    validate(c);
    const double di = delta_tilde(inner, a, c).value;
    const double dout = delta_tilde(outer, a, c).value;
    rep.min_gap = std::min(rep.min_gap, rep.k * di - dout);
    ++rep.count;
  }
  return rep;
}

}  // namespace ncm
