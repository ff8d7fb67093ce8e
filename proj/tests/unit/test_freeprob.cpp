#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncmetric/freeprob.hpp"
#include "ncmetric/json_io.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/metric.hpp"
#include "support.hpp"

using namespace ncm;

namespace {

const cplx I(0.0, 1.0);

OperatorValuedModel law(ScalarLawKind kind, double variance = 1.0, double alpha = 0.0) {
  return OperatorValuedModel(ScalarLaw{kind, variance, alpha});
}

cplx g_at(const OperatorValuedModel& m, cplx z) { return cauchy_G(m, NcPoint::scalar(z)).mat()(0, 0); }

// Principal-branch product √(z − 2r)√(z + 2r), the upper-half-plane branch of √(z² − 4r²).
cplx edge_root(cplx z, double r) { return std::sqrt(z - 2.0 * r) * std::sqrt(z + 2.0 * r); }

}  // namespace

TEST_CASE("cauchy_G closed cases") {
  const cplx z(0.3, 0.7);
  CHECK(std::abs(g_at(law(ScalarLawKind::PointMass), z) - 1.0 / z) < 1e-15);
  CHECK(std::abs(g_at(law(ScalarLawKind::Bernoulli), z) - 0.5 * (1.0 / (z - 1.0) + 1.0 / (z + 1.0))) < 1e-15);
  CHECK(std::abs(g_at(law(ScalarLawKind::Semicircle), 2.0 * I) - I * (1.0 - std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(g_at(law(ScalarLawKind::PointMass, 1.0, 0.5), z) - 1.0 / (z - 0.5)) < 1e-15);

  // Level 2 diagonal arguments go through the quadrature; compare with the level-1 closed forms.
  for (ScalarLawKind kind : {ScalarLawKind::Semicircle, ScalarLawKind::Arcsine, ScalarLawKind::Bernoulli}) {
    const OperatorValuedModel m = law(kind, 2.0);
    const cplx z1(0.4, 0.5), z2(-1.0, 1.5);
    const NcPoint b = NcPoint::scalar_level(CMatrix::diag({z1, z2}));
    const CMatrix g = cauchy_G(m, b).mat();
    CHECK(std::abs(g(0, 0) - g_at(m, z1)) < 1e-10);
    CHECK(std::abs(g(1, 1) - g_at(m, z2)) < 1e-10);
    CHECK(std::abs(g(0, 1)) < 1e-12);
  }
}

TEST_CASE("cauchy_G of matrix models") {
  const MatrixModel comp{CMatrix::diag({1.0, 2.0, 3.0, 4.0}), {2, 2}, ExpectationKind::Compression};
  const cplx z(0.5, 1.0);
  const CMatrix g = cauchy_G(OperatorValuedModel(comp), NcPoint(4, 1, CMatrix::identity(4) * z)).mat();
  for (int k = 0; k < 4; ++k) CHECK(std::abs(g(k, k) - 1.0 / (z - double(k + 1))) < 1e-14);

  const MatrixModel trace{CMatrix::diag({1.0, 2.0, 3.0, 4.0}), {2, 2}, ExpectationKind::BlockTrace};
  const CMatrix gt = cauchy_G(OperatorValuedModel(trace), NcPoint(4, 1, CMatrix::identity(4) * z)).mat();
  const cplx first = 0.5 * (1.0 / (z - 1.0) + 1.0 / (z - 2.0));
  CHECK(std::abs(gt(0, 0) - first) < 1e-14);
  CHECK(std::abs(gt(1, 1) - first) < 1e-14);
  CHECK(std::abs(gt(0, 1)) < 1e-15);

  // E is unital and idempotent.
  CHECK(max_abs_diff(expectation(comp, CMatrix::identity(4)), CMatrix::identity(4)) == 0.0);
  CounterRng rng(1);
  const CMatrix m = random_complex(4, 4, rng);
  CHECK(max_abs_diff(expectation(comp, expectation(comp, m)), expectation(comp, m)) < 1e-15);
  CHECK(max_abs_diff(expectation(trace, expectation(trace, m)), expectation(trace, m)) < 1e-15);
  CHECK(expectation(comp, m)(0, 2) == cplx(0.0));
}

TEST_CASE("F and h") {
  const cplx z(0.2, 0.9);
  const FH pm = F_and_h(law(ScalarLawKind::PointMass), NcPoint::scalar(z));
  CHECK(std::abs(pm.f.mat()(0, 0) - z) < 1e-15);
  CHECK(std::abs(pm.h.mat()(0, 0)) < 1e-15);

  const FH bern = F_and_h(law(ScalarLawKind::Bernoulli), NcPoint::scalar(z));
  CHECK(std::abs(bern.h.mat()(0, 0) + 1.0 / z) < 1e-14);

  const FH semi = F_and_h(law(ScalarLawKind::Semicircle), NcPoint::scalar(z));
  CHECK(std::abs(semi.h.mat()(0, 0) + g_at(law(ScalarLawKind::Semicircle), z)) < 1e-14);
  CHECK(semi.h.mat()(0, 0).imag() >= 0.0);
}

TEST_CASE("half-plane preconditions") {
  const auto semi = law(ScalarLawKind::Semicircle);
  CHECK(error_kind_of([&] { cauchy_G(semi, NcPoint::scalar(-I)); }) == ErrorKind::NotInHalfPlane);
  CHECK(error_kind_of([&] { cauchy_G(semi, NcPoint::scalar(1.0)); }) == ErrorKind::NotInHalfPlane);
  CHECK(error_kind_of([&] { F_and_h(semi, NcPoint::scalar(cplx(0.0, -0.1))); }) == ErrorKind::NotInHalfPlane);
  CHECK(error_kind_of([&] { subordination_solve(semi, CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(-I)); }) ==
        ErrorKind::NotInHalfPlane);
  CHECK(error_kind_of([] { CpMapSpec(ScalarPower{0.5}); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind_of([] { OperatorValuedModel(MatrixModel{CMatrix{{0.0, 1.0}, {0.0, 0.0}}, {2}}); }) ==
        ErrorKind::NonHermitianInput);
  CHECK(error_kind_of([] { OperatorValuedModel(MatrixModel{CMatrix::identity(3), {2, 2}}); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("subordination closed cases") {
  const NcPoint b = NcPoint::scalar(cplx(0.4, 0.8));
  const Subordination id = subordination_solve(law(ScalarLawKind::Semicircle), CpMapSpec(ScalarPower{1.0}), b);
  CHECK(id.trace.iterations == 1);
  CHECK(id.omega.mat() == b.mat());

  // Bernoulli ⊞ 2: ω = z − 1/ω, so ω = (z + √(z−2)√(z+2))/2.
  for (cplx z : {cplx(0.0, 1.0), cplx(1.5, 0.3), cplx(-2.5, 0.6)}) {
    const Subordination s =
        subordination_solve(law(ScalarLawKind::Bernoulli), CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(z));
    CHECK(std::abs(s.omega.mat()(0, 0) - 0.5 * (z + edge_root(z, 1.0))) < 1e-10);
    CHECK(s.trace.converged);
    CHECK(s.trace.iterations <= 200);
  }

  // Semicircle scaling: G(ω(z)) is the semicircle transform of variance t.
  for (double t : {2.0, 3.5}) {
    const cplx z(0.7, 0.4);
    const NcPoint g = convolved_G(law(ScalarLawKind::Semicircle), CpMapSpec(ScalarPower{t}), NcPoint::scalar(z));
    CHECK(std::abs(g.mat()(0, 0) - (z - edge_root(z, std::sqrt(t))) / (2.0 * t)) < 1e-10);
  }
}

TEST_CASE("convolved_G closed cases") {
  const auto bern = law(ScalarLawKind::Bernoulli);
  CHECK(std::abs(convolved_G(bern, CpMapSpec(ScalarPower{1.0}), NcPoint::scalar(3.0 * I)).mat()(0, 0) -
                 g_at(bern, 3.0 * I)) < 1e-15);
  CHECK(std::abs(convolved_G(bern, CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(3.0 * I)).mat()(0, 0) -
                 (-I / std::sqrt(13.0))) < 1e-10);
  CHECK(std::abs(convolved_G(law(ScalarLawKind::Semicircle), CpMapSpec(ScalarPower{4.0}), NcPoint::scalar(5.0 * I))
                     .mat()(0, 0) -
                 I * (5.0 - std::sqrt(41.0)) / 8.0) < 1e-10);
}

TEST_CASE("subordination respects direct sums on a matrix model") {
  const MatrixModel mm{CMatrix{{1.0, 0.5, 0.0, 0.2}, {0.5, -1.0, 0.3, 0.0}, {0.0, 0.3, 0.5, I}, {0.2, 0.0, -I, 0.0}},
                       {2, 2}};
  const OperatorValuedModel model(mm);
  const CpMapSpec rho(ScalarPower{2.0});
  CMatrix b = CMatrix::identity(4) * cplx(0.1, 1.0);
  b(0, 1) = 0.2;
  b(1, 0) = -0.1;
  const NcPoint b1(4, 1, b);
  const Subordination one = subordination_solve(model, rho, b1);
  const Subordination two = subordination_solve(model, rho, direct_sum(b1, b1));
  CHECK(max_abs_diff(two.omega.mat(), direct_sum(one.omega, one.omega).mat()) < 1e-8);
  // Coupling the two blocks leaves B.
  CMatrix off_block = CMatrix::identity(4) * I;
  off_block(0, 2) = 1.0;
  off_block(2, 0) = 1.0;
  CHECK(error_kind_of([&] { subordination_solve(model, rho, NcPoint(4, 1, off_block)); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("MaxIterExceeded") {
  SolveOptions opts;
  opts.tol = 1e-300;
  opts.max_iter = 3;
  opts.damping = DampingRule::Halving;
  const auto bern = law(ScalarLawKind::Bernoulli);
  const NcPoint b = NcPoint::scalar(cplx(0.1, 0.05));
  CHECK(error_kind_of([&] { subordination_solve(bern, CpMapSpec(ScalarPower{2.0}), b, opts); }) ==
        ErrorKind::MaxIterExceeded);
  opts.throw_on_failure = false;
  const Subordination best = subordination_solve(bern, CpMapSpec(ScalarPower{2.0}), b, opts);
  CHECK_FALSE(best.trace.converged);
  CHECK(best.trace.iterations == 3);
}

TEST_CASE("density_grid") {
  SUBCASE("point mass gives a Lorentzian") {
    const double eps = 1e-2;
    const auto rows = density_grid(law(ScalarLawKind::PointMass), CpMapSpec(ScalarPower{1.0}), -5.0, 5.0, eps, 2001);
    const auto peak = std::max_element(rows.begin(), rows.end(),
                                       [](const DensityRow& l, const DensityRow& r) { return l.density < r.density; });
    CHECK(std::abs(peak->x) < 1e-12);
    CHECK(std::abs(peak->density - 1.0 / (std::numbers::pi * eps)) < 1e-9);
    // Lorentzian mass on [−5, 5] is (2/π) atan(5/ε).
    CHECK(std::abs(total_mass(rows) - 2.0 / std::numbers::pi * std::atan(5.0 / eps)) < 1e-3);
  }
  SUBCASE("Bernoulli squared is the arcsine law") {
    const double eps = 1e-3;
    const auto rows = density_grid(law(ScalarLawKind::Bernoulli), CpMapSpec(ScalarPower{2.0}), -2.5, 2.5, eps, 501);
    double worst = 0.0;
    for (const auto& r : rows) {
      CHECK_FALSE(r.error.has_value());
      CHECK(r.density >= -1e-9);
      if (std::abs(r.x) <= 1.8)
        worst = std::max(worst, std::abs(r.density - 1.0 / (std::numbers::pi * std::sqrt(4.0 - r.x * r.x))));
    }
    CHECK(worst <= 3.0 * eps);
    CHECK(std::abs(total_mass(rows) - 1.0) <= 0.05);
  }
  SUBCASE("semicircle edges") {
    const double t = 2.0, eps = 1e-3, half = 2.5 * std::sqrt(t);
    const auto rows = density_grid(law(ScalarLawKind::Semicircle), CpMapSpec(ScalarPower{t}), -half, half, eps, 2001);
    double peak = 0.0;
    for (const auto& r : rows) peak = std::max(peak, r.density);
    double lo = 0.0, hi = 0.0;
    for (const auto& r : rows)
      if (r.density > 0.01 * peak) {
        lo = std::min(lo, r.x);
        hi = std::max(hi, r.x);
      }
    CHECK(std::abs(lo + 2.0 * std::sqrt(t)) <= 2e-2);
    CHECK(std::abs(hi - 2.0 * std::sqrt(t)) <= 2e-2);
  }
  CHECK(error_kind_of([] {
          density_grid(law(ScalarLawKind::PointMass), CpMapSpec(ScalarPower{1.0}), -1.0, 1.0, 0.0, 10);
        }) == ErrorKind::InvalidSpec);
}

TEST_CASE("k0 and its fixed point") {
  SUBCASE("constant h0") {
    const double beta = 2.0;
    const H0Map h0{law(ScalarLawKind::PointMass), CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(I * beta)};
    const NcPoint a = NcPoint::scalar(cplx(0.3, 0.5));
    CHECK(std::abs(k0(h0, a).mat()(0, 0) - I / beta) < 1e-15);
    const K0FixedPoint fp = k0_fixed_point(h0, a);
    CHECK(fp.iterations == 1);
    CHECK(fp.residual == 0.0);
    CHECK(std::abs(fp.x.mat()(0, 0) - (a.mat()(0, 0) + I / beta)) < 1e-15);
  }
  SUBCASE("Bernoulli with rho = 2 and b0 = 2i") {
    // h0(w) = 2i − 1/w, k0(x) = −1/(2i + x); x = i + k0(x) gives x² + ix + 3 = 0.
    const H0Map h0{law(ScalarLawKind::Bernoulli), CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(2.0 * I)};
    const K0FixedPoint fp = k0_fixed_point(h0, NcPoint::scalar(I));
    CHECK(fp.residual < 1e-10);
    CHECK(fp.iterations < 100);
    CHECK(std::abs(fp.x.mat()(0, 0) - I * (std::sqrt(13.0) - 1.0) / 2.0) < 1e-9);
    CHECK(fp.range_excess <= 1e-9);
  }
  SUBCASE("far from the real axis") {
    const H0Map h0{law(ScalarLawKind::Bernoulli), CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(2.0 * I)};
    const NcPoint a = NcPoint::scalar(1e6 * I);
    const K0FixedPoint fp = k0_fixed_point(h0, a);
    CHECK(std::abs(fp.x.mat()(0, 0) - (a.mat()(0, 0) + k0(h0, a).mat()(0, 0))) < 1e-4);
  }
  const H0Map h0{law(ScalarLawKind::Bernoulli), CpMapSpec(ScalarPower{2.0}), NcPoint::scalar(2.0 * I)};
  CHECK(error_kind_of([&] { k0_fixed_point(h0, NcPoint::scalar(1.0)); }) == ErrorKind::NotInHalfPlane);
  K0Options tight;
  tight.tol = 1e-300;
  tight.max_iter = 5;
  CHECK(error_kind_of([&] { k0_fixed_point(h0, NcPoint::scalar(I), tight); }) == ErrorKind::MaxIterExceeded);
}

TEST_CASE("strict Schwarz-Pick for h0 at level 1") {
  const H0Map h0{law(ScalarLawKind::Semicircle), CpMapSpec(ScalarPower{3.0}), NcPoint::scalar(cplx(0.2, 0.5))};
  const NcPoint a = NcPoint::scalar(cplx(0.1, 0.8)), c = NcPoint::scalar(cplx(-0.4, 1.3));
  const StrictContraction sc = h0_strict_contraction(h0, a, c, NcDirection::scalar(cplx(0.3, -0.2)));
  CHECK(sc.lhs <= sc.rhs + 1e-6);
  CHECK(std::abs(sc.rhs - sc.rhs_provable) < 1e-12);
}

TEST_CASE("halfplane_gauge") {
  const NcPoint a = NcPoint::scalar(cplx(0.3, 0.7));
  CHECK(halfplane_gauge(a, a) == 0.0);
  CHECK(std::abs(halfplane_gauge(NcPoint::scalar(2.0 * I), NcPoint::scalar(I)) - 1.0 / std::sqrt(2.0)) < 1e-15);
  const NcPoint m1 = NcPoint::scalar_level(CMatrix{{cplx(0.1, 1.0), 0.2}, {0.3, cplx(0.0, 2.0)}});
  const NcPoint m2 = NcPoint::scalar_level(CMatrix{{cplx(-0.5, 0.6), 0.0}, {I * 0.1, cplx(0.4, 1.1)}});
  const double closed = delta_closed(ClosedKind::HalfPlane, m1, m2, NcDirection::difference(m1, m2)).value;
  CHECK(std::abs(halfplane_gauge(m1, m2) - 2.0 * closed) < 1e-13);
  CHECK(error_kind_of([&] { halfplane_gauge(a, NcPoint::scalar(-I)); }) == ErrorKind::NotInHalfPlane);
}

TEST_CASE("model JSON") {
  const auto j = io::json::parse(R"({"variant":"matrix","X":{"rows":2,"cols":2,"data":[[[1,0],[0,0]],[[0,0],[-1,0]]]},"blocks":[1,1]})");
  const OperatorValuedModel m = io::model_from_json(j);
  CHECK(m.base_dim() == 2);
  CHECK(io::model_to_json(io::model_from_json(io::model_to_json(m))) == io::model_to_json(m));
  CHECK(io::model_from_json(io::json{{"variant", "bernoulli"}}).base_dim() == 1);
  CHECK(error_kind_of([] { io::model_from_json(io::json{{"variant", "cauchy"}}); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("freeprob properties") { require_properties("freeprob/"); }
