#include "ncmetric/props.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ncmetric/counterexample.hpp"
#include "ncmetric/domains.hpp"
#include "ncmetric/error.hpp"
#include "ncmetric/freeprob.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/metric.hpp"
#include "ncmetric/ncfunc.hpp"
#include "ncmetric/parallel.hpp"
#include "ncmetric/rng.hpp"

namespace ncm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Results = std::vector<PropResult>;

bool holds(double v, Relation r, double t) {
  switch (r) {
    case Relation::AtMost: return v <= t;
    case Relation::AtLeast: return v >= t;
    case Relation::Above: return v > t;
    case Relation::Below: return v < t;
  }
  return false;
}

const char* relation_text(Relation r) {
  switch (r) {
    case Relation::AtMost: return "<=";
    case Relation::AtLeast: return ">=";
    case Relation::Above: return ">";
    case Relation::Below: return "<";
  }
  return "?";
}

PropResult result(std::string name, double value, Relation rel, double threshold, std::size_t samples) {
  PropResult r;
  r.name = std::move(name);
  r.value = value;
  r.relation = rel;
  r.threshold = threshold;
  r.samples = samples;
  r.pass = holds(value, rel, threshold);
  return r;
}

std::size_t level_of(std::size_t i) { return 1 + i % 3; }
std::size_t base_of(std::size_t i) { return 1 + (i / 3) % 2; }

CMatrix random_psd(std::size_t n, CounterRng& rng, double floor) {
  CMatrix r = random_complex(n, n, rng);
  return add_identity(r * r.adjoint(), floor);
}

// ---------------------------------------------------------------- matcore

Results matcore_eig(CounterRng& rng) {
  double recon = 0.0, ortho = 0.0;
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + i % 8;
    const CMatrix a = random_hermitian(n, rng);
    const HermEig e = herm_eig(a);
    std::vector<cplx> lam(e.values.begin(), e.values.end());
    const CMatrix rebuilt = e.vectors * CMatrix::diag(lam) * e.vectors.adjoint();
    recon = std::max(recon, (a - rebuilt).frobenius_norm() / std::max(1.0, a.frobenius_norm()));
    ortho = std::max(ortho, add_identity(e.vectors.adjoint() * e.vectors, -1.0).frobenius_norm());
  }
  return {result("herm_eig_reconstruction", recon, Relation::AtMost, 1e-10, count),
          result("herm_eig_orthonormal", ortho, Relation::AtMost, 1e-10, count)};
}

Results matcore_norm(CounterRng& rng) {
  double uinv = 0.0, dsum = 0.0;
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + i % 6, m = 1 + (i / 6) % 5;
    const CMatrix a = random_complex(n, m, rng);
    const CMatrix b = random_complex(m, n, rng);
    const double na = operator_norm(a);
    uinv = std::max(uinv, std::abs(operator_norm(random_unitary(n, rng) * a * random_unitary(m, rng)) - na));
    dsum = std::max(dsum, std::abs(operator_norm(direct_sum(a, b)) - std::max(na, operator_norm(b))));
  }
  return {result("norm_unitary_invariance", uinv, Relation::AtMost, 1e-10, count),
          result("norm_direct_sum_max", dsum, Relation::AtMost, 1e-10, count)};
}

Results matcore_inv_sqrt(CounterRng& rng) {
  double comm = 0.0, whiten = 0.0;
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + i % 8;
    const CMatrix a = random_psd(n, rng, 0.1);
    const CMatrix s = psd_inv_sqrt(a);
    comm = std::max(comm, (s * a - a * s).frobenius_norm());
    whiten = std::max(whiten, add_identity(s * a * s, -1.0).frobenius_norm());
  }
  return {result("inv_sqrt_commutes", comm, Relation::AtMost, 1e-9, count),
          result("inv_sqrt_whitens", whiten, Relation::AtMost, 1e-9, count)};
}

Results matcore_inverse(CounterRng& rng) {
  double worst = 0.0;
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + i % 8;
    const CMatrix a = add_identity(random_complex(n, n, rng), 2.0);
    worst = std::max(worst, add_identity(a * inverse(a), -1.0).frobenius_norm());
  }
  return {result("inverse_residual", worst, Relation::AtMost, 1e-9, count)};
}

// ---------------------------------------------------------------- ncpoint

NcPoint random_point(std::size_t d, std::size_t n, CounterRng& rng) {
  return NcPoint(d, n, random_complex(n * d, n * d, rng));
}

Results ncpoint_direct_sum(CounterRng& rng) {
  double gap = 0.0;
  const std::size_t count = 40;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i);
    const NcPoint x = random_point(d, level_of(i), rng);
    const NcPoint y = random_point(d, level_of(i + 1), rng);
    const NcPoint z = random_point(d, level_of(i + 2), rng);
    gap = std::max(gap, max_abs_diff(direct_sum(direct_sum(x, y), z).mat(), direct_sum(x, direct_sum(y, z)).mat()));
  }
  return {result("direct_sum_associative", gap, Relation::AtMost, 0.0, count)};
}

Results ncpoint_mixed_product(CounterRng& rng) {
  double gap = 0.0;
  const std::size_t count = 40;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i), m = level_of(i + 1), k = 1 + i % 3;
    const NcDirection b = sample_direction(d, n, m, rng);
    const CMatrix z1 = random_complex(k, k, rng), z2 = random_complex(k, k, rng);
    const CMatrix lhs = kron(z1, CMatrix::identity(n * d)) * amplify(z2, b).mat();
    const CMatrix rhs = amplify(z1 * z2, b).mat();
    gap = std::max(gap, max_abs_diff(lhs, rhs) / std::max(1.0, rhs.max_abs()));
  }
  return {result("amplify_mixed_product", gap, Relation::AtMost, 1e-12, count)};
}

Results ncpoint_conjugate_spectrum(CounterRng& rng) {
  double gap = 0.0;
  const std::size_t count = 40;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = random_point(d, n, rng);
    const NcPoint u = unitary_conjugate(random_unitary(n, rng), a);
    for (const auto part : {&real_part, &imag_part}) {
      const auto e1 = herm_eig(part(a.mat())).values;
      const auto e2 = herm_eig(part(u.mat())).values;
      for (std::size_t j = 0; j < e1.size(); ++j) gap = std::max(gap, std::abs(e1[j] - e2[j]));
    }
  }
  return {result("unitary_conjugate_spectrum", gap, Relation::AtMost, 1e-10, count)};
}

// ---------------------------------------------------------------- domains

struct KernelCase {
  KernelSpec kernel;
  DomainSpec sampler;
};

std::vector<KernelCase> kernel_cases() {
  return {
      {KernelSpec::ball(), DomainSpec::ball()},
      {KernelSpec::halfplane(), DomainSpec::halfplane()},
      {KernelSpec(ComposedBallKernel{NcFunctionSpec(Polynomial{{0.1, 0.5, 0.25}})}), DomainSpec::ball()},
      {KernelSpec(ComposedHalfPlaneKernel{NcFunctionSpec(Affine{2.0, cplx(0.5, 0.0)})}), DomainSpec::halfplane()},
  };
}

Results domains_kernel_laws(CounterRng& rng) {
  Results out;
  for (const auto& kc : kernel_cases()) {
    double block_gap = 0.0, inter_gap = 0.0;
    const std::size_t count = 20;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t d = base_of(i);
      const std::size_t n1 = level_of(i), n2 = level_of(i + 1), m1 = level_of(i + 2), m2 = 1 + (i / 2) % 2;
      const NcPoint a1 = sample_point(kc.sampler, d, n1, rng), a2 = sample_point(kc.sampler, d, n2, rng);
      const NcPoint c1 = sample_point(kc.sampler, d, m1, rng), c2 = sample_point(kc.sampler, d, m2, rng);
      const CMatrix p = random_complex((n1 + n2) * d, (m1 + m2) * d, rng);
      const CMatrix whole = kernel_eval(kc.kernel, direct_sum(a1, a2), direct_sum(c1, c2), p);
      const std::size_t r0[2] = {0, n1 * d}, rs[2] = {n1 * d, n2 * d};
      const std::size_t s0[2] = {0, m1 * d}, ss[2] = {m1 * d, m2 * d};
      const NcPoint* as[2] = {&a1, &a2};
      const NcPoint* cs[2] = {&c1, &c2};
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
          const CMatrix part = kernel_eval(kc.kernel, *as[r], *cs[s], p.block(r0[r], s0[s], rs[r], ss[s]));
          block_gap = std::max(block_gap, max_abs_diff(whole.block(r0[r], s0[s], rs[r], ss[s]), part));
        }

      const CMatrix u = random_unitary(n1, rng), v = random_unitary(m1, rng);
      const CMatrix ud = kron(u, CMatrix::identity(d)), vd = kron(v, CMatrix::identity(d));
      const CMatrix q = random_complex(n1 * d, m1 * d, rng);
      const CMatrix lhs = kernel_eval(kc.kernel, unitary_conjugate(u, a1), unitary_conjugate(v, c1), ud * q * vd.adjoint());
      const CMatrix rhs = ud * kernel_eval(kc.kernel, a1, c1, q) * vd.adjoint();
      inter_gap = std::max(inter_gap, max_abs_diff(lhs, rhs));
    }
    out.push_back(result("kernel_direct_sum_block_law/" + kc.kernel.name(), block_gap, Relation::AtMost, 1e-12, count));
    out.push_back(result("kernel_unitary_intertwining/" + kc.kernel.name(), inter_gap, Relation::AtMost, 1e-10, count));
  }
  return out;
}

Results domains_ball_membership(CounterRng& rng) {
  std::size_t mismatches = 0, used = 0;
  const DomainSpec ball = DomainSpec::ball();
  for (std::size_t i = 0; i < 120; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    CMatrix z = random_complex(n * d, n * d, rng);
    z *= cplx(rng.uniform(0.5, 1.5) / operator_norm(z));
    const double nz = operator_norm(z);
    if (std::abs(nz - 1.0) < 1e-6) continue;
    ++used;
    if (contains(ball, NcPoint(d, n, z)) != (nz < 1.0)) ++mismatches;
  }
  return {result("ball_membership_matches_norm", static_cast<double>(mismatches), Relation::AtMost, 0.0, used)};
}

Results domains_identities(CounterRng& rng) {
  double hp = 0.0, bl = 0.0;
  const std::size_t count = 40;
  const cplx two_i(0.0, 2.0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    {
      const CMatrix a = sample_point(DomainSpec::halfplane(), d, n, rng).mat();
      const CMatrix c = sample_point(DomainSpec::halfplane(), d, n, rng).mat();
      auto h = [&](const CMatrix& x, const CMatrix& y) { return (x - y.adjoint()) * (1.0 / two_i); };
      const CMatrix hcc_inv = inverse(h(c, c));
      const CMatrix lhs = h(a, c) * hcc_inv * h(c, a) - h(a, a);
      const CMatrix rhs = 0.25 * ((a - c) * hcc_inv * (a - c).adjoint());
      hp = std::max(hp, max_abs_diff(lhs, rhs));
    }
    {
      const CMatrix a = sample_point(DomainSpec::ball(), d, n, rng).mat();
      const CMatrix c = sample_point(DomainSpec::ball(), d, n, rng).mat();
      auto one_minus = [&](const CMatrix& x) { return add_identity(-x, 1.0); };
      const CMatrix g_inv = inverse(one_minus(c * c.adjoint()));
      const CMatrix lhs = one_minus(a * c.adjoint()) * g_inv * one_minus(c * a.adjoint()) - one_minus(a * a.adjoint());
      const CMatrix diff = c - a;
      const CMatrix rhs = diff * c.adjoint() * g_inv * c * diff.adjoint() + diff * diff.adjoint();
      bl = std::max(bl, max_abs_diff(lhs, rhs));
    }
  }
  return {result("halfplane_schur_identity", hp, Relation::AtMost, 1e-10, count),
          result("ball_schur_identity", bl, Relation::AtMost, 1e-10, count)};
}

Results domains_membership_invariance(CounterRng& rng) {
  std::size_t flips = 0;
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    const DomainSpec dom = i % 2 ? DomainSpec::halfplane() : DomainSpec::ball();
    CMatrix z = random_complex(n * d, n * d, rng);
    if (i % 2) z = add_identity(z, cplx(0.0, rng.uniform(0.0, 2.0)));
    else z *= cplx(rng.uniform(0.3, 1.7) / operator_norm(z));
    const NcPoint a(d, n, z);
    if (contains(dom, a) != contains(dom, unitary_conjugate(random_unitary(n, rng), a))) ++flips;
  }
  return {result("kernel_domain_unitary_invariance", static_cast<double>(flips), Relation::AtMost, 0.0, count)};
}

Results domains_direct_sum_closure(CounterRng& rng) {
  std::size_t disk_fail = 0, nil_fail = 0;
  const std::size_t count = 40;
  const SpectralDisk disk{0.1, 0.6, {NormBound::Rule::Constant, 0.7}};
  const DomainSpec disk_dom(disk), nil_dom(NilpotentCone{});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = level_of(i), m = level_of(i + 1);
    const NcPoint a = sample_selfadjoint_in_disk(disk, n, rng);
    const NcPoint c = sample_selfadjoint_in_disk(disk, m, rng);
    if (!contains(disk_dom, a) || !contains(disk_dom, c) || !contains(disk_dom, direct_sum(a, c))) ++disk_fail;

    auto nilpotent = [&](std::size_t k) {
      CMatrix t(k, k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t s = r + 1; s < k; ++s) t(r, s) = rng.complex_normal();
      const CMatrix u = random_unitary(k, rng);
      return NcPoint::scalar_level(u * t * u.adjoint());
    };
    const NcPoint x = nilpotent(n), y = nilpotent(m);
    if (!contains(nil_dom, x) || !contains(nil_dom, y) || !contains(nil_dom, direct_sum(x, y))) ++nil_fail;
  }
  return {result("spectral_disk_direct_sum_closure", static_cast<double>(disk_fail), Relation::AtMost, 0.0, count),
          result("nilpotent_direct_sum_closure", static_cast<double>(nil_fail), Relation::AtMost, 0.0, count)};
}

// ---------------------------------------------------------------- metric

struct KernelDomainCase {
  const char* tag;
  DomainSpec domain;
  ClosedKind closed;
};

std::vector<KernelDomainCase> closed_domains() {
  return {{"ball", DomainSpec::ball(), ClosedKind::Ball}, {"halfplane", DomainSpec::halfplane(), ClosedKind::HalfPlane}};
}

Results metric_oracle(CounterRng& rng) {
  Results out;
  for (const auto& dc : closed_domains()) {
    double vs_closed = 0.0, vs_kernel = 0.0;
    const std::size_t count = 100;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t d = base_of(i), n = level_of(i);
      const NcPoint a = sample_point(dc.domain, d, n, rng), c = sample_point(dc.domain, d, n, rng);
      const NcDirection b = sample_direction(d, n, n, rng);
      const double ray = delta_ray(dc.domain, a, c, b, kRayDefaultTol).value;
      vs_closed = std::max(vs_closed, std::abs(ray - delta_closed(dc.closed, a, c, b).value));
      vs_kernel = std::max(vs_kernel, std::abs(ray - delta_kernel(*dc.domain.kernel(), a, c, b).value));
    }
    out.push_back(result(std::string("ray_vs_closed/") + dc.tag, vs_closed, Relation::AtMost, 5e-6, count));
    out.push_back(result(std::string("ray_vs_kernel/") + dc.tag, vs_kernel, Relation::AtMost, 5e-6, count));
  }
  return out;
}

double kernel_delta(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const NcDirection& b) {
  return delta_kernel(*d.kernel(), a, c, b).value;
}

Results metric_homogeneity(CounterRng& rng) {
  double worst = 0.0;
  const std::size_t count = 50;
  for (std::size_t i = 0; i < count; ++i) {
    const auto dc = closed_domains()[i % 2];
    const std::size_t d = base_of(i), n = level_of(i), m = level_of(i + 1);
    const NcPoint a = sample_point(dc.domain, d, n, rng), c = sample_point(dc.domain, d, m, rng);
    const NcDirection b = sample_direction(d, n, m, rng);
    const double s = rng.uniform(0.0, 5.0);
    const double base = kernel_delta(dc.domain, a, c, b);
    const double scaled = kernel_delta(dc.domain, a, c, b.scaled(s));
    worst = std::max(worst, std::abs(scaled - s * base) / std::max(1e-300, s * base));
  }
  return {result("delta_homogeneity", worst, Relation::AtMost, 1e-9, count)};
}

Results metric_lemma_rules(CounterRng& rng) {
  double uinv = 0.0, diag = 0.0, counter = 0.0, ampl = 0.0;
  const std::size_t count = 50;
  for (std::size_t i = 0; i < count; ++i) {
    const auto dc = closed_domains()[i % 2];
    const DomainSpec& D = dc.domain;
    const std::size_t d = base_of(i), n = level_of(i), m = level_of(i + 1);

    const NcPoint a = sample_point(D, d, n, rng), c = sample_point(D, d, m, rng);
    const NcDirection b = sample_direction(d, n, m, rng);
    const double base = kernel_delta(D, a, c, b);
    const CMatrix u = random_unitary(n, rng), v = random_unitary(m, rng);
    uinv = std::max(uinv, std::abs(kernel_delta(D, unitary_conjugate(u, a), unitary_conjugate(v, c),
                                                unitary_conjugate(u, b, v)) -
                                   base));

    const std::size_t n2 = level_of(i + 2), m2 = 1 + (i / 2) % 2;
    const NcPoint a2 = sample_point(D, d, n2, rng), c2 = sample_point(D, d, m2, rng);
    const NcDirection b11 = sample_direction(d, n, m, rng), b22 = sample_direction(d, n2, m2, rng);
    const NcDirection b12 = sample_direction(d, n, m2, rng), b21 = sample_direction(d, n2, m, rng);
    const NcPoint big_a = direct_sum(a, a2), big_c = direct_sum(c, c2);
    CMatrix bd((n + n2) * d, (m + m2) * d), bc((n + n2) * d, (m + m2) * d);
    bd.set_block(0, 0, b11.mat());
    bd.set_block(n * d, m * d, b22.mat());
    bc.set_block(0, m * d, b12.mat());
    bc.set_block(n * d, 0, b21.mat());
    const double whole_d = kernel_delta(D, big_a, big_c, NcDirection(d, n + n2, m + m2, bd));
    diag = std::max(diag, std::abs(whole_d - std::max(kernel_delta(D, a, c, b11), kernel_delta(D, a2, c2, b22))));
    const double whole_c = kernel_delta(D, big_a, big_c, NcDirection(d, n + n2, m + m2, bc));
    counter = std::max(counter,
                       std::abs(whole_c - std::max(kernel_delta(D, a, c2, b12), kernel_delta(D, a2, c, b21))));

    const std::size_t k = 2 + i % 2;
    const CMatrix z = random_complex(k, k, rng);
    const double amp = kernel_delta(D, amplify(k, a), amplify(k, c), amplify(z, b));
    ampl = std::max(ampl, std::abs(amp - base * operator_norm(z)));
  }
  return {result("delta_unitary_invariance", uinv, Relation::AtMost, 1e-8, count),
          result("delta_diagonal_max_rule", diag, Relation::AtMost, 1e-8, count),
          result("delta_counterdiagonal_max_rule", counter, Relation::AtMost, 1e-8, count),
          result("delta_amplification", ampl, Relation::AtMost, 1e-8, count)};
}

Results metric_nondegeneracy(CounterRng& rng) {
  double least = std::numeric_limits<double>::infinity();
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const auto dc = closed_domains()[i % 2];
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = sample_point(dc.domain, d, n, rng);
    const NcDirection b = sample_direction(d, n, n, rng, std::pow(10.0, -rng.uniform(0.0, 5.5)));
    if (operator_norm(b.mat()) <= 1e-6) continue;
    least = std::min(least, delta_ray(dc.domain, a, a, b, 1e-6).bracket_lo);
  }
  return {result("delta_nondegenerate", least, Relation::Above, 0.0, count)};
}

Results metric_tilde(CounterRng& rng) {
  double gap = 0.0;
  const std::size_t count = 100;
  for (std::size_t i = 0; i < count; ++i) {
    const auto dc = closed_domains()[i % 2];
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = sample_point(dc.domain, d, n, rng), c = sample_point(dc.domain, d, n, rng);
    const double tilde = delta_tilde_closed(*dc.domain.kernel(), a, c).value;
    gap = std::max(gap, std::abs(tilde - kernel_delta(dc.domain, a, c, NcDirection::difference(a, c))));
  }
  const DomainSpec ball = DomainSpec::ball();
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = sample_point(ball, d, n, rng, 0.99), c = sample_point(ball, d, n, rng, 0.99);
    const double tilde = delta_tilde(KernelSpec::ball(), a, c).value;
    lower = std::min(lower, tilde - operator_norm(a.mat() - c.mat()));
  }
  return {result("tilde_equals_delta_of_difference", gap, Relation::AtMost, 1e-8, count),
          result("tilde_norm_lower_bound", lower, Relation::AtLeast, -1e-9, count)};
}

Results metric_ordering(CounterRng& rng) {
  double single = -std::numeric_limits<double>::infinity();
  double refined = -std::numeric_limits<double>::infinity();
  double monotone = -std::numeric_limits<double>::infinity();
  const std::size_t count = 16;
  for (std::size_t i = 0; i < count; ++i) {
    const auto dc = closed_domains()[i % 2];
    const std::size_t d = 1 + (i / 2) % 2, n = 1 + (i / 4) % 2;
    const NcPoint a = sample_point(dc.domain, d, n, rng), c = sample_point(dc.domain, d, n, rng);
    const double tilde = delta_tilde(*dc.domain.kernel(), a, c).value;
    DivisionOptions opts;
    opts.refinements = 0;
    single = std::max(single, dtilde_upper(dc.domain, a, c, opts).value - tilde);
    opts.refinements = 8;
    const DivisionBound fine = dtilde_upper(dc.domain, a, c, opts);
    const double path = d_upper(dc.domain, Path::straight(a, c), 256).value;
    refined = std::max(refined, fine.value - path);
    for (std::size_t k = 1; k < fine.running_min.size(); ++k)
      monotone = std::max(monotone, fine.running_min[k] - fine.running_min[k - 1]);
  }
  return {result("single_division_within_tilde", single, Relation::AtMost, 1e-8, count),
          result("refined_division_within_path", refined, Relation::AtMost, 1e-4, count),
          result("division_bound_nonincreasing", monotone, Relation::AtMost, 0.0, count)};
}

Results metric_semicontinuity(CounterRng& rng) {
  double excess = -std::numeric_limits<double>::infinity();
  const std::size_t count = 20;
  for (std::size_t i = 0; i < count; ++i) {
    const auto dc = closed_domains()[i % 2];
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = sample_point(dc.domain, d, n, rng), c = sample_point(dc.domain, d, n, rng);
    const NcDirection b = sample_direction(d, n, n, rng);
    const CMatrix e = random_complex(n * d, n * d, rng);
    const double limit = delta_ray(dc.domain, a, c, b, 1e-8).value;
    for (int k = 14; k <= 24; ++k) {
      const NcPoint ak(d, n, a.mat() + std::ldexp(1.0, -k) * e);
      excess = std::max(excess, delta_ray(dc.domain, ak, c, b, 1e-8).value - limit);
    }
  }
  return {result("delta_upper_semicontinuous", excess, Relation::AtMost, 1e-3, count)};
}

Results metric_blowup(CounterRng& rng) {
  double worst_step = -std::numeric_limits<double>::infinity();
  double prev = 0.0, last = 0.0;
  for (int j = 1; j <= 30; ++j) {
    const double r = 1.0 - std::ldexp(1.0, -j);
    const double v = delta_tilde(KernelSpec::ball(), NcPoint::scalar(0.0), NcPoint::scalar(r)).value;
    if (j > 4) worst_step = std::max(worst_step, prev - v);
    prev = v;
    last = v;
  }
  const BoundedTildeCase bounded = bounded_tilde_counterexample(rng(), 60);
  return {result("ball_tilde_increases_to_boundary", worst_step, Relation::Below, 0.0, 26),
          result("ball_tilde_at_depth_30", last, Relation::AtLeast, 1e4, 1),
          result("spectral_disk_tilde_bounded", bounded.max_tilde, Relation::AtMost, bounded.bound + 1e-9,
                 bounded.samples)};
}

// ---------------------------------------------------------------- ncfunc

std::vector<NcFunctionSpec> function_zoo() {
  return {
      NcFunctionSpec(Polynomial{{0.2, -1.0, 0.5, cplx(0.0, 0.3)}}),
      NcFunctionSpec(MoebiusBall{cplx(0.3, -0.2)}),
      NcFunctionSpec(Affine{cplx(0.5, 1.0), cplx(-0.1, 0.0)}),
      NcFunctionSpec(ScalarCalculus{SeriesKind::Exp}),
      NcFunctionSpec(ScalarCalculus{SeriesKind::Geometric}),
      NcFunctionSpec(ScalarCalculus{SeriesKind::Log1p}),
      NcFunctionSpec(Composition{{NcFunctionSpec(MoebiusBall{0.4}), NcFunctionSpec(Polynomial{{0.0, 0.5, 0.5}})}}),
  };
}

// Points with spectral radius ≤ 0.7 so every zoo member is defined on them and their block sums.
NcPoint small_point(std::size_t d, std::size_t n, CounterRng& rng) {
  return sample_point(DomainSpec::ball(), d, n, rng, 0.7);
}

Results ncfunc_differences(CounterRng& rng) {
  double secant = 0.0, linear = 0.0;
  const std::size_t count = 14;
  const auto zoo = function_zoo();
  for (const auto& f : zoo) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t d = base_of(i), n = level_of(i), m = level_of(i + 1);
      const NcPoint a = small_point(d, n, rng), c = small_point(d, n, rng);
      const CMatrix fa = eval(f, a).mat(), fc = eval(f, c).mat();
      const CMatrix df = delta_f(f, a, c, NcDirection::difference(a, c)).mat();
      secant = std::max(secant, max_abs_diff(df, fa - fc) / std::max(1.0, fa.max_abs()));

      const NcPoint c2 = small_point(d, m, rng);
      const NcDirection b1 = sample_direction(d, n, m, rng, 0.5), b2 = sample_direction(d, n, m, rng, 0.5);
      const cplx s1 = rng.complex_normal(), s2 = rng.complex_normal();
      const NcDirection mix(d, n, m, s1 * b1.mat() + s2 * b2.mat());
      const CMatrix lhs = delta_f(f, a, c2, mix).mat();
      const CMatrix rhs = s1 * delta_f(f, a, c2, b1).mat() + s2 * delta_f(f, a, c2, b2).mat();
      linear = std::max(linear, max_abs_diff(lhs, rhs) / std::max(1.0, rhs.max_abs()));
    }
  }
  return {result("difference_quotient_secant", secant, Relation::AtMost, 1e-9, count * zoo.size()),
          result("difference_quotient_linear", linear, Relation::AtMost, 1e-10, count * zoo.size())};
}

Results ncfunc_finite_difference(CounterRng& rng) {
  double worst = 0.0;
  const std::size_t count = 30;
  const std::vector<NcFunctionSpec> polys = {
      NcFunctionSpec(Polynomial{{0.0, 0.0, 1.0}}),
      NcFunctionSpec(Polynomial{{1.0, -2.0, 0.5, cplx(0.0, 1.0), 0.25}}),
  };
  const double eps = 1e-5;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& f = polys[i % polys.size()];
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = small_point(d, n, rng);
    const NcDirection b = sample_direction(d, n, n, rng);
    const CMatrix exact = delta_f(f, a, a, b).mat();
    const CMatrix fd = (apply(f, a.mat() + eps * b.mat()) - apply(f, a.mat() - eps * b.mat())) * (1.0 / (2.0 * eps));
    worst = std::max(worst, max_abs_diff(exact, fd) / std::max(1.0, exact.max_abs()));
  }
  return {result("derivative_matches_central_difference", worst, Relation::AtMost, 1e-6, count)};
}

Results ncfunc_moebius(CounterRng& rng) {
  double norm = 0.0, order = 0.0;
  const std::size_t count = 60;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    const cplx alpha = std::polar(rng.uniform(0.0, 0.95), rng.uniform(0.0, 2.0 * M_PI));
    const NcPoint a = sample_point(DomainSpec::ball(), d, n, rng, 0.99);
    const CMatrix fa = eval(NcFunctionSpec(MoebiusBall{alpha}), a).mat();
    norm = std::max(norm, operator_norm(fa));
    const CMatrix den = inverse(add_identity(-std::conj(alpha) * a.mat(), 1.0));
    const CMatrix num = add_identity(a.mat(), -alpha);
    order = std::max(order, max_abs_diff(num * den, den * num) / std::max(1.0, fa.max_abs()));
  }
  return {result("moebius_maps_ball_into_ball", norm, Relation::Below, 1.0, count),
          result("moebius_factor_order", order, Relation::AtMost, 1e-12, count)};
}

Results ncfunc_axioms(CounterRng& rng) {
  AxiomReport worst;
  const auto zoo = function_zoo();
  std::size_t checked = 0;
  for (std::size_t f = 0; f < zoo.size(); ++f) {
    std::vector<NcPoint> pts;
    for (std::size_t i = 0; i < 12; ++i) pts.push_back(small_point(1 + f % 2, level_of(i), rng));
    const AxiomReport r = check_axioms(zoo[f], pts, rng());
    worst.direct_sum = std::max(worst.direct_sum, r.direct_sum);
    worst.permutation = std::max(worst.permutation, r.permutation);
    worst.rectangular = std::max(worst.rectangular, r.rectangular);
    worst.similarity = std::max(worst.similarity, r.similarity);
    worst.skipped += r.skipped;
    checked += r.checked;
  }
  return {result("axiom_direct_sum", worst.direct_sum, Relation::AtMost, 1e-12, checked),
          result("axiom_permutation", worst.permutation, Relation::AtMost, 1e-12, checked),
          result("axiom_rectangular", worst.rectangular, Relation::AtMost, 1e-12, checked),
          result("axiom_similarity", worst.similarity, Relation::AtMost, 1e-9, checked),
          result("axiom_samples_skipped", static_cast<double>(worst.skipped), Relation::AtMost, 0.0, checked)};
}

std::vector<ContractionSample> ball_samples(std::size_t count, CounterRng& rng) {
  std::vector<ContractionSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i), m = level_of(i + 1);
    out.push_back({sample_point(DomainSpec::ball(), d, n, rng), sample_point(DomainSpec::ball(), d, m, rng),
                   sample_direction(d, n, m, rng)});
  }
  return out;
}

Results ncfunc_schwarz_pick(CounterRng& rng) {
  const DomainSpec ball = DomainSpec::ball();
  double eq = 0.0;
  const std::size_t maps = 50;
  for (std::size_t i = 0; i < maps; ++i) {
    const cplx alpha = std::polar(rng.uniform(0.0, 0.9), rng.uniform(0.0, 2.0 * M_PI));
    const auto rep = check_contraction(NcFunctionSpec(MoebiusBall{alpha}), ball, ball, ball_samples(3, rng));
    eq = std::max(eq, rep.max_abs_gap);
  }
  const auto sq = check_contraction(NcFunctionSpec(Polynomial{{0.0, 0.0, 0.5}}), ball, ball, ball_samples(100, rng));
  return {result("moebius_preserves_delta", eq, Relation::AtMost, 1e-6, maps * 3),
          result("half_square_contracts_delta", sq.max_excess, Relation::AtMost, 1e-7, sq.count)};
}

Results ncfunc_nesting(CounterRng& rng) {
  const DomainSpec inner(KernelDomain{KernelSpec(ComposedBallKernel{NcFunctionSpec(Affine{2.0, 0.0})})});
  const DomainSpec outer = DomainSpec::ball();
  std::vector<std::pair<NcPoint, NcPoint>> pairs;
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t n = 1 + i % 2;
    auto pick = [&] {
      const NcPoint p = sample_point(DomainSpec::ball(), 1, n, rng, 0.98);
      return NcPoint(1, n, 0.5 * p.mat());
    };
    NcPoint a = pick();
    NcPoint c = i % 10 == 0 ? a : pick();
    pairs.emplace_back(std::move(a), std::move(c));
  }
  const NestingReport rep = compare_nested(inner, outer, 0.5, 0.5, pairs, rng());
  return {result("nested_ball_comparison", rep.min_gap, Relation::AtLeast, -1e-8, rep.count)};
}

// ---------------------------------------------------------------- freeprob

MatrixModel six_by_six(CounterRng& rng, ExpectationKind kind = ExpectationKind::Compression) {
  return MatrixModel{random_hermitian(6, rng), {2, 2, 2}, kind};
}

// Level-n point over B with Im ≻ 0; every d×d block lies in B.
NcPoint b_point(const MatrixModel& m, std::size_t level, CounterRng& rng, double im_floor = 0.2) {
  const std::size_t d = m.x.rows();
  const std::size_t dim = level * d;
  CMatrix re(dim, dim), im(dim, dim);
  std::size_t off = 0;
  for (std::size_t k : m.blocks) {
    const bool scalar_block = m.expectation == ExpectationKind::BlockTrace;
    const std::size_t sz = scalar_block ? 1 : k;
    const CMatrix h = random_hermitian(level * sz, rng);
    const CMatrix r = random_complex(level * sz, level * sz, rng);
    const CMatrix p = add_identity(0.5 * (r * r.adjoint()), rng.uniform(im_floor, 1.0));
    for (std::size_t i = 0; i < level; ++i)
      for (std::size_t j = 0; j < level; ++j)
        for (std::size_t u = 0; u < k; ++u)
          for (std::size_t v = 0; v < k; ++v) {
            if (scalar_block && u != v) continue;
            const std::size_t su = scalar_block ? 0 : u, sv = scalar_block ? 0 : v;
            re(i * d + off + u, j * d + off + v) = h(i * sz + su, j * sz + sv);
            im(i * d + off + u, j * d + off + v) = p(i * sz + su, j * sz + sv);
          }
    off += k;
  }
  return NcPoint(d, level, re + cplx(0.0, 1.0) * im);
}

Results freeprob_direct_sums(CounterRng& rng) {
  double worst = 0.0;
  const std::size_t count = 10;
  const CpMapSpec rho(ScalarPower{2.0});
  for (std::size_t i = 0; i < count; ++i) {
    const MatrixModel mm = six_by_six(rng, i % 2 ? ExpectationKind::BlockTrace : ExpectationKind::Compression);
    const OperatorValuedModel model(mm);
    const NcPoint b = b_point(mm, 1, rng);
    const NcPoint w1 = subordination_solve(model, rho, b).omega;
    const NcPoint w2 = subordination_solve(model, rho, direct_sum(b, b)).omega;
    worst = std::max(worst, max_abs_diff(w2.mat(), direct_sum(w1, w1).mat()));
  }
  const OperatorValuedModel semi(ScalarLaw{ScalarLawKind::Semicircle, 1.0});
  for (std::size_t i = 0; i < count; ++i) {
    const NcPoint b = NcPoint::scalar(cplx(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0)));
    const NcPoint w1 = subordination_solve(semi, rho, b).omega;
    const NcPoint w2 = subordination_solve(semi, rho, direct_sum(b, b)).omega;
    worst = std::max(worst, max_abs_diff(w2.mat(), direct_sum(w1, w1).mat()));
  }
  return {result("subordination_respects_direct_sums", worst, Relation::AtMost, 1e-8, 2 * count)};
}

Results freeprob_strict_contraction(CounterRng& rng) {
  double scalar_excess = -std::numeric_limits<double>::infinity();
  double matrix_excess = -std::numeric_limits<double>::infinity();
  double stated_on_matrix = -std::numeric_limits<double>::infinity();
  const std::size_t count = 20;
  const std::vector<ScalarLaw> laws = {{ScalarLawKind::Semicircle, 1.0, 0.0}, {ScalarLawKind::Bernoulli, 1.0, 0.0}};
  auto upper = [&](double floor) { return cplx(rng.uniform(-2.0, 2.0), rng.uniform(floor, 2.0)); };
  for (std::size_t i = 0; i < count; ++i) {
    const H0Map h0{OperatorValuedModel(laws[i % 2]), CpMapSpec(ScalarPower{1.0 + rng.uniform(0.5, 3.0)}),
                   NcPoint::scalar(upper(0.5))};
    const StrictContraction sc =
        h0_strict_contraction(h0, NcPoint::scalar(upper(0.2)), NcPoint::scalar(upper(0.2)),
                              NcDirection::scalar(rng.complex_normal()));
    scalar_excess = std::max(scalar_excess, sc.lhs - sc.rhs);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const MatrixModel mm = six_by_six(rng);
    const OperatorValuedModel model(mm);
    const CpMapSpec rho = i % 2 ? CpMapSpec(ScalarPower{1.0 + rng.uniform(0.5, 3.0)})
                                : CpMapSpec(KrausAugment{{expectation(mm, random_complex(6, 6, rng))}});
    const H0Map h0{model, rho, b_point(mm, 1, rng, 0.5)};
    const NcPoint a = b_point(mm, 1, rng), c = b_point(mm, 1, rng);
    const NcDirection b(6, 1, 1, expectation(mm, random_complex(6, 6, rng)));
    const StrictContraction sc = h0_strict_contraction(h0, a, c, b);
    matrix_excess = std::max(matrix_excess, sc.lhs - sc.rhs_provable);
    stated_on_matrix = std::max(stated_on_matrix, sc.lhs - sc.rhs);
  }
  return {result("h0_strict_schwarz_pick/scalar", scalar_excess, Relation::AtMost, 1e-6, count),
          result("h0_strict_schwarz_pick/matrix_provable_factor", matrix_excess, Relation::AtMost, 1e-6, count),
          // The inverse-norm factor is not a bound once Im h0 is a matrix; a positive excess reproduces that.
          result("h0_inverse_norm_factor_fails_on_matrices", stated_on_matrix, Relation::Above, 0.0, count)};
}

Results freeprob_certificate(CounterRng& rng) {
  double scalar_worst = -std::numeric_limits<double>::infinity();
  double matrix_worst = -std::numeric_limits<double>::infinity();
  std::size_t scalar_solves = 0, matrix_solves = 0, max_iter = 0;
  auto note = [&](const SolveTrace& t, bool matrix) {
    if (!t.converged || t.ratios.empty()) return;
    max_iter = std::max(max_iter, t.iterations);
    if (matrix) {
      matrix_worst = std::max(matrix_worst, t.tail_ratio - t.provable_factor);
      ++matrix_solves;
    } else {
      scalar_worst = std::max(scalar_worst, t.tail_ratio - t.theoretical_factor);
      ++scalar_solves;
    }
  };
  const OperatorValuedModel bern(ScalarLaw{ScalarLawKind::Bernoulli});
  const CpMapSpec two(ScalarPower{2.0});
  for (int i = 0; i < 20; ++i)
    note(subordination_solve(bern, two, NcPoint::scalar(cplx(-3.0 + 6.0 * i / 19.0, 0.5 + 0.1 * i))).trace, false);
  const OperatorValuedModel semi(ScalarLaw{ScalarLawKind::Semicircle, 1.0});
  for (double t : {2.0, 4.0}) {
    const CpMapSpec rho(ScalarPower{t});
    for (int i = 0; i < 41; ++i) {
      const double x = -2.5 * std::sqrt(t) + 5.0 * std::sqrt(t) * i / 40.0;
      note(subordination_solve(semi, rho, NcPoint::scalar(cplx(x, 1e-2))).trace, false);
    }
  }
  for (int i = 0; i < 20; ++i) {
    const MatrixModel mm = six_by_six(rng);
    note(subordination_solve(OperatorValuedModel(mm), two, b_point(mm, 1, rng)).trace, true);
  }
  return {result("tail_ratio_within_certificate/scalar", scalar_worst, Relation::AtMost, 0.05, scalar_solves),
          result("tail_ratio_within_provable_factor/matrix", matrix_worst, Relation::AtMost, 0.05, matrix_solves),
          result("solver_iterations", static_cast<double>(max_iter), Relation::AtMost, 200.0,
                 scalar_solves + matrix_solves)};
}

Results freeprob_h_behaviour(CounterRng& rng) {
  double mono = -std::numeric_limits<double>::infinity();
  double im_h = std::numeric_limits<double>::infinity();
  double decay = 0.0;
  const std::size_t count = 10;
  for (std::size_t i = 0; i < count; ++i) {
    const MatrixModel mm = six_by_six(rng);
    const OperatorValuedModel model(mm);
    // y ↦ ||E[y²(y² + (x − X)²)^{-1}]^{-1}|| − 1 on a geometric grid.
    const CMatrix x = real_part(b_point(mm, 1, rng).mat());
    const CMatrix shift = x - mm.x;
    const CMatrix sq = shift * shift;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 40; ++k) {
      const double y = std::pow(10.0, -1.0 + 3.0 * k / 40.0);
      const CMatrix inner = y * y * inverse(add_identity(sq, y * y));
      const double v = operator_norm(inverse(expectation(mm, inner))) - 1.0;
      if (k > 0) mono = std::max(mono, v - prev);
      prev = v;
    }

    const NcPoint base = b_point(mm, 1, rng);
    const CMatrix u = real_part(base.mat()), v = imag_part(base.mat());
    for (double y : {1e2, 1e4, 1e6}) {
      const NcPoint b(6, 1, u + cplx(0.0, y) * v);
      const CMatrix h = F_and_h(model, b).h.mat();
      const CMatrix imh = imag_part(h);
      im_h = std::min(im_h, min_eigenvalue(imh));
      if (y == 1e6) decay = std::max(decay, operator_norm(imh) / y);
    }
    for (int k = 0; k < 5; ++k) im_h = std::min(im_h, min_eigenvalue(imag_part(F_and_h(model, b_point(mm, 1 + k % 2, rng, 0.05)).h.mat())));
  }
  return {result("decay_surrogate_nonincreasing", mono, Relation::AtMost, 1e-9, count),
          result("im_h_nonnegative", im_h, Relation::AtLeast, -1e-9, count * 8),
          result("im_h_over_y_decay", decay, Relation::Below, 1e-3, count)};
}

Results freeprob_expectation(CounterRng& rng) {
  double worst = 0.0;
  const std::size_t count = 20;
  for (std::size_t i = 0; i < count; ++i) {
    const MatrixModel mm = six_by_six(rng, i % 2 ? ExpectationKind::BlockTrace : ExpectationKind::Compression);
    const std::size_t n = 1 + i % 2;
    const CMatrix m = random_complex(6 * n, 6 * n, rng);
    const CMatrix em = expectation(mm, m);
    worst = std::max(worst, max_abs_diff(expectation(mm, CMatrix::identity(6 * n)), CMatrix::identity(6 * n)));
    worst = std::max(worst, max_abs_diff(expectation(mm, em), em));
    const CMatrix b1 = b_point(mm, n, rng).mat(), b2 = b_point(mm, n, rng).mat();
    worst = std::max(worst, max_abs_diff(expectation(mm, b1 * m * b2), b1 * em * b2));
  }
  return {result("expectation_axioms", worst, Relation::AtMost, 1e-12, count)};
}

Results freeprob_cauchy_sign(CounterRng& rng) {
  double top = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  const std::vector<ScalarLaw> laws = {{ScalarLawKind::Semicircle, 1.5, 0.0},
                                       {ScalarLawKind::Bernoulli, 1.0, 0.0},
                                       {ScalarLawKind::Arcsine, 1.0, 0.0},
                                       {ScalarLawKind::PointMass, 1.0, 0.7}};
  for (const auto& law : laws) {
    const OperatorValuedModel model(law);
    for (int i = 0; i < 10; ++i) {
      const std::size_t n = 1 + i % 2;
      CMatrix h = random_hermitian(n, rng);
      CMatrix r = random_complex(n, n, rng);
      const NcPoint b = NcPoint::scalar_level(h + cplx(0.0, 1.0) * add_identity(0.5 * (r * r.adjoint()), 0.1));
      top = std::max(top, max_eigenvalue(imag_part(cauchy_G_unchecked(model, b))));
      ++count;
    }
  }
  for (int i = 0; i < 50; ++i) {
    const MatrixModel mm = six_by_six(rng);
    top = std::max(top, max_eigenvalue(imag_part(cauchy_G_unchecked(OperatorValuedModel(mm), b_point(mm, 1, rng)))));
    ++count;
  }
  return {result("cauchy_transform_im_negative", top, Relation::Below, 0.0, count)};
}

Results freeprob_density(CounterRng&) {
  const OperatorValuedModel semi(ScalarLaw{ScalarLawKind::Semicircle, 1.0});
  const auto rows = density_grid(semi, CpMapSpec(ScalarPower{2.0}), -4.0, 4.0, 1e-2, 401);
  double least = std::numeric_limits<double>::infinity();
  std::size_t failed = 0;
  for (const auto& r : rows) {
    least = std::min(least, r.density);
    if (!r.converged) ++failed;
  }
  return {result("density_nonnegative", least, Relation::AtLeast, -1e-9, rows.size()),
          result("density_mass_error", std::abs(1.0 - total_mass(rows)), Relation::AtMost, 0.05, rows.size()),
          result("density_rows_failed", static_cast<double>(failed), Relation::AtMost, 0.0, rows.size())};
}

Results freeprob_k0(CounterRng& rng) {
  double excess = -std::numeric_limits<double>::infinity(), resid = 0.0;
  std::size_t iters = 0;
  const std::size_t count = 10;
  const OperatorValuedModel bern(ScalarLaw{ScalarLawKind::Bernoulli});
  const H0Map h0{bern, CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(cplx(0.0, 2.0))};
  for (std::size_t i = 0; i < count; ++i) {
    const NcPoint a = NcPoint::scalar(cplx(rng.uniform(-2.0, 2.0), rng.uniform(0.1, 3.0)));
    const K0FixedPoint fp = k0_fixed_point(h0, a);
    excess = std::max(excess, fp.range_excess);
    resid = std::max(resid, fp.residual);
    iters = std::max(iters, fp.iterations);
  }
  return {result("k0_range_containment", excess, Relation::AtMost, 1e-9, count),
          result("k0_fixed_point_residual", resid, Relation::Below, 1e-10, count)};
}

Results freeprob_gauge(CounterRng& rng) {
  double worst = 0.0;
  const std::size_t count = 40;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t d = base_of(i), n = level_of(i);
    const NcPoint a = sample_point(DomainSpec::halfplane(), d, n, rng);
    const NcPoint c = sample_point(DomainSpec::halfplane(), d, n, rng);
    const double g = halfplane_gauge(a, c);
    worst = std::max(worst, std::abs(g - 2.0 * delta_closed(ClosedKind::HalfPlane, a, c, NcDirection::difference(a, c)).value));
  }
  return {result("gauge_is_twice_delta", worst, Relation::AtMost, 1e-10, count)};
}

using CaseFn = Results (*)(CounterRng&);

PropCase make_case(const char* module, const char* name, CaseFn fn) {
  return PropCase{module, name, [module, fn](std::uint64_t seed, std::uint64_t stream) {
                    CounterRng rng(seed, stream);
                    Results rs = fn(rng);
                    for (auto& r : rs) r.module = module;
                    return rs;
                  }};
}

}  // namespace

const std::vector<PropCase>& property_catalog() {
  static const std::vector<PropCase> catalog = {
      make_case("matcore", "eig", matcore_eig),
      make_case("matcore", "norm", matcore_norm),
      make_case("matcore", "inv_sqrt", matcore_inv_sqrt),
      make_case("matcore", "inverse", matcore_inverse),
      make_case("ncpoint", "direct_sum", ncpoint_direct_sum),
      make_case("ncpoint", "mixed_product", ncpoint_mixed_product),
      make_case("ncpoint", "conjugate_spectrum", ncpoint_conjugate_spectrum),
      make_case("domains", "kernel_laws", domains_kernel_laws),
      make_case("domains", "ball_membership", domains_ball_membership),
      make_case("domains", "identities", domains_identities),
      make_case("domains", "membership_invariance", domains_membership_invariance),
      make_case("domains", "direct_sum_closure", domains_direct_sum_closure),
      make_case("metric", "oracle", metric_oracle),
      make_case("metric", "homogeneity", metric_homogeneity),
      make_case("metric", "lemma_rules", metric_lemma_rules),
      make_case("metric", "nondegeneracy", metric_nondegeneracy),
      make_case("metric", "tilde", metric_tilde),
      make_case("metric", "ordering", metric_ordering),
      make_case("metric", "semicontinuity", metric_semicontinuity),
      make_case("metric", "blowup", metric_blowup),
      make_case("ncfunc", "differences", ncfunc_differences),
      make_case("ncfunc", "finite_difference", ncfunc_finite_difference),
      make_case("ncfunc", "moebius", ncfunc_moebius),
      make_case("ncfunc", "axioms", ncfunc_axioms),
      make_case("ncfunc", "schwarz_pick", ncfunc_schwarz_pick),
      make_case("ncfunc", "nesting", ncfunc_nesting),
      make_case("freeprob", "direct_sums", freeprob_direct_sums),
      make_case("freeprob", "strict_contraction", freeprob_strict_contraction),
      make_case("freeprob", "certificate", freeprob_certificate),
      make_case("freeprob", "h_behaviour", freeprob_h_behaviour),
      make_case("freeprob", "expectation", freeprob_expectation),
      make_case("freeprob", "cauchy_sign", freeprob_cauchy_sign),
      make_case("freeprob", "density", freeprob_density),
      make_case("freeprob", "k0", freeprob_k0),
      make_case("freeprob", "gauge", freeprob_gauge),
  };
  return catalog;
}

std::vector<PropResult> run_properties(std::uint64_t seed, const std::string& filter) {
  const auto& catalog = property_catalog();
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    if (filter.empty() || (catalog[i].module + "/" + catalog[i].name).find(filter) != std::string::npos)
      chosen.push_back(i);
  std::vector<Results> per_case(chosen.size());
  parallel_for(chosen.size(), [&](std::size_t k) {
    const PropCase& pc = catalog[chosen[k]];
    try {
      per_case[k] = pc.run(seed, chosen[k]);
    } catch (const std::exception& e) {
      PropResult r;
      r.module = pc.module;
      r.name = pc.name;
      r.value = kNaN;
      r.note = e.what();
      per_case[k] = {r};
    }
  });
  std::vector<PropResult> out;
  for (auto& rs : per_case)
    for (auto& r : rs) out.push_back(std::move(r));
  return out;
}

std::string format_report(const std::vector<PropResult>& results) {
  std::string out;
  std::size_t failed = 0;
  char buf[512];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%-9s %-44s n=%-4zu %-24.17g %-2s %-10.3g %s", r.module.c_str(), r.name.c_str(),
                  r.samples, r.value, relation_text(r.relation), r.threshold, r.pass ? "PASS" : "FAIL");
    out += buf;
    if (!r.note.empty()) out += "  # " + r.note;
    out += '\n';
    if (!r.pass) ++failed;
  }
  std::snprintf(buf, sizeof buf, "%zu properties, %zu failed\n", results.size(), failed);
  out += buf;
  return out;
}

}  // namespace ncm
