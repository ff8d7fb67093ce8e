#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncmetric/json_io.hpp"
#include "ncmetric/ncpoint.hpp"
#include "support.hpp"

using namespace ncm;

TEST_CASE("direct_sum of points") {
  const NcPoint s = direct_sum(NcPoint::scalar(1.0), NcPoint::scalar(2.0));
  CHECK(s.level() == 2);
  CHECK(s.base_dim() == 1);
  CHECK(s.mat() == CMatrix::diag({1.0, 2.0}));

  const NcPoint id2(2, 1, CMatrix::identity(2));
  const NcPoint big = direct_sum(id2, id2);
  CHECK(big.level() == 2);
  CHECK(big.base_dim() == 2);
  CHECK(big.mat() == CMatrix::identity(4));

  CHECK(direct_sum(NcPoint::scalar(3.0), NcPoint::scalar(0.5)).mat() == CMatrix::diag({3.0, 0.5}));

  CHECK(error_kind_of([&] { direct_sum(id2, NcPoint::scalar(1.0)); }) == ErrorKind::BaseDimMismatch);
}

TEST_CASE("point construction validates shapes") {
  CHECK(error_kind_of([] { NcPoint(2, 2, CMatrix::identity(3)); }) == ErrorKind::DimMismatch);
  CHECK(error_kind_of([] { NcPoint(0, 1, CMatrix()); }) == ErrorKind::DimMismatch);
  CHECK(error_kind_of([] { NcDirection(1, 2, 1, CMatrix(2, 2)); }) == ErrorKind::DimMismatch);
}

TEST_CASE("amplify directions") {
  const NcDirection b(1, 1, 2, CMatrix{{1.0, cplx(0, 2)}});
  CHECK(amplify(CMatrix::scalar(1.0), b).mat() == b.mat());

  const NcDirection twice = amplify(CMatrix::identity(2), b);
  CHECK(twice.row_level() == 2);
  CHECK(twice.col_level() == 4);
  CHECK(twice.mat() == direct_sum(b, b).mat());

  const NcDirection scaled = amplify(CMatrix::diag({2.0, 0.0}), b);
  CMatrix expected(2, 4);
  expected.set_block(0, 0, 2.0 * b.mat());
  CHECK(scaled.mat() == expected);

  const NcPoint a(2, 1, CMatrix{{1.0, 2.0}, {3.0, 4.0}});
  const NcPoint a3 = amplify(3, a);
  CHECK(a3.level() == 3);
  CHECK(a3.mat().block(2, 2, 2, 2) == a.mat());
  CHECK(a3.mat().block(0, 2, 2, 2) == CMatrix(2, 2));
}

TEST_CASE("block_upper") {
  const NcPoint p = block_upper(NcPoint::scalar(0.0), NcDirection::scalar(3.0), NcPoint::scalar(0.0));
  CHECK(p.mat() == CMatrix{{0.0, 3.0}, {0.0, 0.0}});

  const NcPoint a(1, 2, CMatrix{{1.0, 2.0}, {0.0, 1.0}});
  const NcPoint c = NcPoint::scalar(cplx(0, 1));
  CHECK(block_upper(a, NcDirection(1, 2, 1, CMatrix(2, 1)), c).mat() == direct_sum(a, c).mat());

  const cplx i(0, 1);
  CHECK(block_upper(NcPoint::scalar(i), NcDirection::scalar(1.0), NcPoint::scalar(i)).mat() ==
        CMatrix{{i, 1.0}, {0.0, i}});

  CHECK(error_kind_of([&] { block_upper(a, NcDirection::scalar(1.0), c); }) == ErrorKind::DimMismatch);
}

TEST_CASE("unitary_conjugate") {
  const NcPoint a(1, 2, CMatrix{{1.0, 2.0}, {3.0, 4.0}});
  CHECK(unitary_conjugate(CMatrix::identity(2), a).mat() == a.mat());

  const NcPoint x(1, 1, CMatrix::scalar(5.0));
  const NcPoint y(1, 1, CMatrix::scalar(-1.0));
  const CMatrix swap{{0.0, 1.0}, {1.0, 0.0}};
  CHECK(unitary_conjugate(swap, direct_sum(x, y)).mat() == direct_sum(y, x).mat());

  // Phase conjugation rotates the corner: diag(e^{iθ/2}, e^{−iθ/2}) [[a, sb], [0, c]] diag(...)* = [[a, e^{iθ}sb], [0, c]].
  const double theta = 0.7;
  const CMatrix phase = CMatrix::diag({std::polar(1.0, theta / 2), std::polar(1.0, -theta / 2)});
  const cplx av(0.2, 0.1), bv(0.3, -0.4), cv(-0.5, 0.0);
  const NcPoint block = block_upper(NcPoint::scalar(av), NcDirection::scalar(bv), NcPoint::scalar(cv));
  const CMatrix expected{{av, std::polar(1.0, theta) * bv}, {0.0, cv}};
  CHECK(max_abs_diff(unitary_conjugate(phase, block).mat(), expected) < 1e-15);

  // Base dimension 2: the unitary acts on levels only.
  const NcPoint d2(2, 2, CMatrix{{1.0, 2.0, 0.0, 0.0}, {3.0, 4.0, 0.0, 0.0}, {0.0, 0.0, 5.0, 6.0}, {0.0, 0.0, 7.0, 8.0}});
  const NcPoint swapped = unitary_conjugate(swap, d2);
  CHECK(swapped.mat().block(0, 0, 2, 2) == d2.mat().block(2, 2, 2, 2));
  CHECK(swapped.mat().block(2, 2, 2, 2) == d2.mat().block(0, 0, 2, 2));

  CHECK(error_kind_of([&] { unitary_conjugate(CMatrix::diag({2.0, 1.0}), a); }) == ErrorKind::NotUnitary);
  CHECK(error_kind_of([&] { unitary_conjugate(CMatrix::identity(3), a); }) == ErrorKind::DimMismatch);
}

TEST_CASE("direction helpers") {
  const NcPoint a(1, 2, CMatrix{{1.0, 2.0}, {3.0, 4.0}});
  const NcPoint c(1, 2, CMatrix::identity(2));
  CHECK(NcDirection::difference(a, c).mat() == CMatrix{{0.0, 2.0}, {3.0, 3.0}});
  CHECK(NcDirection::difference(a, c).scaled(2.0).mat() == CMatrix{{0.0, 4.0}, {6.0, 6.0}});
  CHECK(adjoint(a).mat() == CMatrix{{1.0, 3.0}, {2.0, 4.0}});
  CHECK(error_kind_of([&] { NcDirection::difference(a, NcPoint::scalar(1.0)); }) == ErrorKind::DimMismatch);
}

TEST_CASE("point JSON layout") {
  const NcPoint p(2, 1, CMatrix{{1.0, cplx(0, 1)}, {0.0, 2.0}});
  const auto j = io::point_to_json(p);
  CHECK(j.at("base_dim") == 2);
  CHECK(j.at("level") == 1);
  CHECK(j.at("mat").at("rows") == 2);
  const NcPoint back = io::point_from_json(j);
  CHECK(back.base_dim() == 2);
  CHECK(back.level() == 1);
  CHECK(back.mat() == p.mat());
}

TEST_CASE("ncpoint properties") { require_properties("ncpoint/"); }
