#include <cmath>
#include <vector>

#include "doctest.h"
#include "ncmetric/domains.hpp"
#include "ncmetric/json_io.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/ncfunc.hpp"
#include "support.hpp"

using namespace ncm;

namespace {

const cplx I(0.0, 1.0);

NcFunctionSpec square() { return NcFunctionSpec(Polynomial{{0.0, 0.0, 1.0}}); }

}  // namespace

TEST_CASE("eval closed cases") {
  const NcPoint a = NcPoint::scalar_level(CMatrix{{0.2, I}, {0.1, -0.3}});
  CHECK(eval(NcFunctionSpec::identity(), a).mat() == a.mat());
  CHECK(max_abs_diff(eval(NcFunctionSpec(MoebiusBall{0.0}), a).mat(), a.mat()) < 1e-15);
  CHECK(eval(square(), NcPoint::scalar_level(CMatrix{{0.0, 1.0}, {0.0, 0.0}})).mat() == CMatrix(2, 2));

  // exp(diag(0, ln 2)) = diag(1, 2) and exp([[0,1],[0,0]]) = [[1,1],[0,1]].
  const NcFunctionSpec ex(ScalarCalculus{SeriesKind::Exp});
  CHECK(max_abs_diff(apply(ex, CMatrix::diag({0.0, std::log(2.0)})), CMatrix::diag({1.0, 2.0})) < 1e-14);
  CHECK(max_abs_diff(apply(ex, CMatrix{{0.0, 1.0}, {0.0, 0.0}}), CMatrix{{1.0, 1.0}, {0.0, 1.0}}) < 1e-14);

  const NcFunctionSpec geo(ScalarCalculus{SeriesKind::Geometric});
  CHECK(std::abs(apply(geo, CMatrix::scalar(0.5))(0, 0) - 2.0) < 1e-13);
  const NcFunctionSpec log1p(ScalarCalculus{SeriesKind::Log1p});
  CHECK(std::abs(apply(log1p, CMatrix::scalar(0.5))(0, 0) - std::log(1.5)) < 1e-13);

  // Norm above the radius but spectrum inside: (I − x)^{-1}.
  const CMatrix x{{0.5, 10.0}, {0.0, 0.5}};
  CHECK(max_abs_diff(apply(geo, x), inverse(add_identity(-x, 1.0))) < 1e-10);

  // Composition applies parts left to right: (2z)².
  const NcFunctionSpec comp(Composition{{NcFunctionSpec(Affine{2.0, 0.0}), square()}});
  CHECK(std::abs(apply(comp, CMatrix::scalar(0.3))(0, 0) - 0.36) < 1e-15);
}

TEST_CASE("Moebius factor orders agree") {
  const cplx alpha(0.3, -0.5);
  const CMatrix b{{0.1, 0.4}, {-0.2, I * 0.3}};
  const CMatrix denom = add_identity(-std::conj(alpha) * b, 1.0);
  const CMatrix left_form = inverse(denom) * add_identity(b, -alpha);
  CHECK(max_abs_diff(apply(NcFunctionSpec(MoebiusBall{alpha}), b), left_form) < 1e-14);
  // Maps 0 to −α and α to 0.
  CHECK(std::abs(apply(NcFunctionSpec(MoebiusBall{alpha}), CMatrix::scalar(0.0))(0, 0) + alpha) < 1e-15);
  CHECK(std::abs(apply(NcFunctionSpec(MoebiusBall{alpha}), CMatrix::scalar(alpha))(0, 0)) < 1e-15);
}

TEST_CASE("delta_f closed cases") {
  const NcPoint a = NcPoint::scalar(cplx(0.2, 0.1)), c = NcPoint::scalar(-0.4);
  const NcDirection b = NcDirection::scalar(cplx(0.5, -0.5));
  CHECK(delta_f(NcFunctionSpec::identity(), a, c, b).mat() == b.mat());

  const cplx expected = a.mat()(0, 0) * b.mat()(0, 0) + b.mat()(0, 0) * c.mat()(0, 0);
  CHECK(std::abs(delta_f(square(), a, c, b).mat()(0, 0) - expected) < 1e-15);

  // a = c at matrix level: ab + ba.
  const NcPoint m = NcPoint::scalar_level(CMatrix{{0.1, 0.2}, {0.3, 0.4}});
  const NcDirection bm(1, 2, 2, CMatrix{{1.0, -1.0}, {I, 0.5}});
  const CMatrix oracle = m.mat() * bm.mat() + bm.mat() * m.mat();
  CHECK(max_abs_diff(delta_f(square(), m, m, bm).mat(), oracle) < 1e-15);

  // Mixed levels keep the shape of b.
  const NcDirection rect(1, 2, 1, CMatrix{{1.0}, {2.0}});
  const NcDirection out = delta_f(square(), m, c, rect);
  CHECK(out.row_level() == 2);
  CHECK(out.col_level() == 1);
  CHECK(max_abs_diff(out.mat(), m.mat() * rect.mat() + rect.mat() * c.mat()) < 1e-15);

  // Geometric series: Δf(a,c)(b) = (1 − a)^{-1} b (1 − c)^{-1}.
  const NcFunctionSpec geo(ScalarCalculus{SeriesKind::Geometric});
  const cplx got = delta_f(geo, a, c, b).mat()(0, 0);
  const cplx want = b.mat()(0, 0) / ((1.0 - a.mat()(0, 0)) * (1.0 - c.mat()(0, 0)));
  CHECK(std::abs(got - want) < 1e-12);
}

TEST_CASE("check_axioms") {
  CounterRng rng(9);
  std::vector<NcPoint> samples;
  for (std::size_t i = 0; i < 8; ++i) samples.push_back(sample_point(DomainSpec::ball(), 1, 1 + i % 3, rng, 0.7));
  for (const NcFunctionSpec& f : {NcFunctionSpec::identity(), square(), NcFunctionSpec(MoebiusBall{cplx(0.2, 0.3)}),
                                  NcFunctionSpec(ScalarCalculus{SeriesKind::Exp})}) {
    const AxiomReport rep = check_axioms(f, samples, 4);
    CHECK(rep.checked == samples.size());
    CHECK(rep.skipped == 0);
    CHECK(rep.direct_sum <= 1e-12);
    CHECK(rep.permutation <= 1e-12);
    CHECK(rep.rectangular <= 1e-12);
    CHECK(rep.similarity <= 1e-9);
  }
  // The identity respects every intertwining exactly at the direct-sum and permutation level.
  const AxiomReport id = check_axioms(NcFunctionSpec::identity(), samples, 4);
  CHECK(id.direct_sum == 0.0);
  CHECK(id.permutation == 0.0);
}

TEST_CASE("evaluation errors") {
  const NcFunctionSpec geo(ScalarCalculus{SeriesKind::Geometric});
  CHECK(error_kind_of([&] { eval(geo, NcPoint::scalar(1.5)); }) == ErrorKind::DomainViolation);
  CHECK(error_kind_of([&] { eval(NcFunctionSpec(MoebiusBall{0.5}), NcPoint::scalar(2.0)); }) ==
        ErrorKind::DomainViolation);
  CHECK(error_kind_of([] { NcFunctionSpec(MoebiusBall{1.0}); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind_of([] { NcFunctionSpec(MoebiusBall{cplx(0.8, 0.8)}); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind_of([] { NcFunctionSpec(Polynomial{}); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind_of([] { NcFunctionSpec(Composition{}); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind_of([] { apply(NcFunctionSpec::identity(), CMatrix(2, 3)); }) == ErrorKind::NotSquare);
}

TEST_CASE("function JSON") {
  const NcFunctionSpec comp(
      Composition{{NcFunctionSpec(MoebiusBall{cplx(0.1, 0.2)}), NcFunctionSpec(Polynomial{{0.0, 0.5, 0.5}}),
                   NcFunctionSpec(ScalarCalculus{SeriesKind::Log1p}), NcFunctionSpec(Affine{2.0, I})}});
  const auto j = io::function_to_json(comp);
  CHECK(io::function_to_json(io::function_from_json(j)) == j);
  const CMatrix x{{0.1, 0.05}, {0.0, -0.2}};
  CHECK(max_abs_diff(apply(io::function_from_json(j), x), apply(comp, x)) == 0.0);
  CHECK(error_kind_of([] { io::function_from_json(io::json{{"variant", "sine"}}); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("ncfunc properties") { require_properties("ncfunc/"); }
