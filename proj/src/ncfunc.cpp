#include "ncmetric/ncfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ncmetric/error.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/rng.hpp"

namespace ncm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const NcFunctionSpec::Variant& v) {
  std::visit(overloaded{
                 [](const Polynomial& p) {
                   if (p.coeffs.empty()) throw NcError(ErrorKind::InvalidSpec, "polynomial without coefficients");
                   for (const auto& c : p.coeffs)
                     if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                       throw NcError(ErrorKind::InvalidSpec, "non-finite polynomial coefficient");
                 },
                 [](const MoebiusBall& m) {
                   if (!(std::abs(m.alpha) < 1.0 - 1e-9))
                     throw NcError(ErrorKind::InvalidSpec, "Moebius parameter must satisfy |alpha| < 1");
                 },
                 [](const Affine& a) {
                   if (!std::isfinite(std::abs(a.beta)) || !std::isfinite(std::abs(a.gamma)))
                     throw NcError(ErrorKind::InvalidSpec, "non-finite affine parameters");
                 },
                 [](const ScalarCalculus&) {},
                 [](const Composition& c) {
                   if (c.parts.empty()) throw NcError(ErrorKind::InvalidSpec, "empty composition");
                 },
             },
             v);
}

double series_radius(SeriesKind kind) {
  return kind == SeriesKind::Exp ? std::numeric_limits<double>::infinity() : 1.0;
}

cplx series_coeff(SeriesKind kind, std::size_t k) {
  switch (kind) {
    case SeriesKind::Exp: {
      double f = 1.0;
      for (std::size_t i = 2; i <= k; ++i) f /= static_cast<double>(i);
      return f;
    }
    case SeriesKind::Geometric: return 1.0;
    case SeriesKind::Log1p:
      if (k == 0) return 0.0;
      return (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
  }
  return 0.0;
}

// Majorant of the tail Σ_{k>n} |c_k| r^k.
double series_tail_bound(SeriesKind kind, std::size_t n, double r) {
  const double rn1 = std::pow(r, static_cast<double>(n + 1));
  switch (kind) {
    case SeriesKind::Exp: {
      double lg = std::lgamma(static_cast<double>(n + 2));
      return std::exp((n + 1) * std::log(std::max(r, 1e-300)) - lg + r);
    }
    case SeriesKind::Geometric: return rn1 / (1.0 - r);
    case SeriesKind::Log1p: return rn1 / (static_cast<double>(n + 1) * (1.0 - r));
  }
  return std::numeric_limits<double>::infinity();
}

CMatrix apply_series(SeriesKind kind, const CMatrix& x) {
  constexpr std::size_t kMaxTerms = 20000;
  const std::size_t n = x.rows();
  const double radius = series_radius(kind);
  if (std::isfinite(radius)) {
    double spec = 0.0;
    for (const auto& l : eigenvalues(x)) spec = std::max(spec, std::abs(l));
    if (!(spec < radius * (1.0 - 1e-12)))
      throw NcError(ErrorKind::DomainViolation, "spectrum outside the disk of convergence");
  }
  const double r = operator_norm(x);
  const bool bounded_tail = r < radius;

  CMatrix sum = series_coeff(kind, 0) * CMatrix::identity(n);
  CMatrix power = CMatrix::identity(n);
  int small_terms = 0;
  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    power = power * x;
    const CMatrix term = series_coeff(kind, k) * power;
    sum += term;
    if (bounded_tail) {
      if (series_tail_bound(kind, k, r) < kSeriesTailTol) return sum;
    } else {
      // Norm exceeds the radius while the spectrum does not: fall back on term decay.
      small_terms = term.frobenius_norm() < kSeriesTailTol * std::max(1.0, sum.frobenius_norm()) ? small_terms + 1 : 0;
      if (small_terms >= 16) return sum;
    }
    if (power.max_abs() > 1e200) break;
  }
  throw NcError(ErrorKind::SeriesNotConverged, "power series did not reach the tail tolerance");
}

}  // namespace

NcFunctionSpec::NcFunctionSpec(Variant v) : v_(std::move(v)) { validate(v_); }

CMatrix apply(const NcFunctionSpec& f, const CMatrix& x) {
  if (!x.is_square()) throw NcError(ErrorKind::NotSquare, "nc function argument");
  const std::size_t n = x.rows();
  return std::visit(
      overloaded{
          [&](const Polynomial& p) {
            CMatrix acc = p.coeffs.back() * CMatrix::identity(n);
            for (std::size_t k = p.coeffs.size() - 1; k-- > 0;) acc = add_identity(acc * x, p.coeffs[k]);
            return acc;
          },
          [&](const MoebiusBall& m) {
            try {
              const CMatrix denom = add_identity(-std::conj(m.alpha) * x, 1.0);
              return add_identity(x, -m.alpha) * inverse(denom);
            } catch (const NcError& e) {
              if (e.kind() == ErrorKind::SingularMatrix)
                throw NcError(ErrorKind::DomainViolation, "Moebius pole: 1 - conj(alpha) b is singular");
              throw;
            }
          },
          [&](const Affine& a) { return add_identity(a.beta * x, a.gamma); },
          [&](const ScalarCalculus& s) { return apply_series(s.kind, x); },
          [&](const Composition& c) {
            CMatrix y = x;
            for (const auto& part : c.parts) y = apply(part, y);
            return y;
          },
      },
      f.variant());
}

NcPoint eval(const NcFunctionSpec& f, const NcPoint& a) {
  return NcPoint(a.base_dim(), a.level(), apply(f, a.mat()));
}

NcDirection delta_f(const NcFunctionSpec& f, const NcPoint& a, const NcPoint& c, const NcDirection& b) {
  const NcPoint big = block_upper(a, b, c);
  const CMatrix fx = apply(f, big.mat());
  return NcDirection(b.base_dim(), b.row_level(), b.col_level(), fx.block(0, a.dim(), a.dim(), c.dim()));
}

double AxiomReport::max_violation() const {
  return std::max({direct_sum, similarity, rectangular, permutation});
}

namespace {

// ||f(a)·S − S·f(c)||_max / max(1, ||f(a)||_max), S acting as S ⊗ I_d.
double intertwining_gap(const CMatrix& fa, const CMatrix& s, const CMatrix& fc, std::size_t d) {
  const CMatrix sd = kron(s, CMatrix::identity(d));
  return max_abs_diff(fa * sd, sd * fc) / std::max(1.0, fa.max_abs());
}

}  // namespace

AxiomReport check_axioms(const NcFunctionSpec& f, std::span<const NcPoint> samples, std::uint64_t seed) {
  AxiomReport rep;
  CounterRng rng(seed, 0xA710);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const NcPoint& a = samples[i];
    const NcPoint& c = samples[(i + 1) % samples.size()];
    if (a.base_dim() != c.base_dim()) {
      ++rep.skipped;
      continue;
    }
    const std::size_t d = a.base_dim();
    try {
      const CMatrix fa = apply(f, a.mat());
      const CMatrix fc = apply(f, c.mat());
      const CMatrix fac = apply(f, direct_sum(a.mat(), c.mat()));
      rep.direct_sum = std::max(rep.direct_sum,
                                max_abs_diff(fac, direct_sum(fa, fc)) / std::max(1.0, fac.max_abs()));

      // (a ⊕ c) S = S (c ⊕ a) with S = [[0, I_n], [I_m, 0]].
      const std::size_t n = a.level(), m = c.level();
      CMatrix perm(n + m, n + m);
      for (std::size_t k = 0; k < n; ++k) perm(k, m + k) = 1.0;
      for (std::size_t k = 0; k < m; ++k) perm(n + k, k) = 1.0;
      const CMatrix fca = apply(f, direct_sum(c.mat(), a.mat()));
      rep.permutation = std::max(rep.permutation, intertwining_gap(fac, perm, fca, d));

      // (a ⊕ c) [I; 0] = [I; 0] a.
      CMatrix incl(n + m, n);
      for (std::size_t k = 0; k < n; ++k) incl(k, k) = 1.0;
      rep.rectangular = std::max(rep.rectangular, intertwining_gap(fac, incl, fa, d));

      // a S = S (S^{-1} a S) for a random well-conditioned scalar S.
      CMatrix s = add_identity(0.3 * random_complex(n, n, rng), 1.0);
      const CMatrix sd = kron(s, CMatrix::identity(d));
      const CMatrix similar = inverse(sd) * a.mat() * sd;
      rep.similarity = std::max(rep.similarity, intertwining_gap(fa, s, apply(f, similar), d));
      ++rep.checked;
    } catch (const NcError&) {
      ++rep.skipped;
    }
  }
  return rep;
}

}  // namespace ncm
