#include <cmath>

#include "doctest.h"
#include "ncmetric/json_io.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/matrix.hpp"
#include "support.hpp"

using namespace ncm;

namespace {

bool unitary(const CMatrix& v) { return add_identity(v.adjoint() * v, -1.0).frobenius_norm() <= 1e-10; }

}  // namespace

TEST_CASE("herm_eig on small closed cases") {
  SUBCASE("identity") {
    const HermEig e = herm_eig(CMatrix::identity(3));
    REQUIRE(e.values.size() == 3);
    for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(unitary(e.vectors));
  }
  SUBCASE("diagonal comes back ascending") {
    const HermEig e = herm_eig(CMatrix::diag({2.0, -1.0}));
    CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("swap matrix has eigenvalues -1 and 1") {
    const HermEig e = herm_eig(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(std::abs(e.values[0] + 1.0) < 1e-14);
    CHECK(std::abs(e.values[1] - 1.0) < 1e-14);
    CHECK(unitary(e.vectors));
  }
  SUBCASE("complex Hermitian 2x2 matches the quadratic formula") {
    // [[2, 1+i], [1-i, 3]]: λ = (5 ± √(1 + 8)) / 2 = 1, 4.
    const HermEig e = herm_eig(CMatrix{{2.0, cplx(1, 1)}, {cplx(1, -1), 3.0}});
    CHECK(std::abs(e.values[0] - 1.0) < 1e-13);
    CHECK(std::abs(e.values[1] - 4.0) < 1e-13);
  }
  SUBCASE("1x1 and empty-offdiagonal inputs") {
    CHECK(herm_eig(CMatrix::scalar(-3.5)).values[0] == -3.5);
  }
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  CHECK(error_kind_of([] { herm_eig(CMatrix{{0.0, 1.0}, {0.0, 0.0}}); }) == ErrorKind::NonHermitianInput);
  CHECK(error_kind_of([] { herm_eig(CMatrix(2, 3)); }) == ErrorKind::NotSquare);
}

TEST_CASE("is_strictly_positive") {
  CHECK(is_strictly_positive(CMatrix::identity(2), 0.0));
  CHECK_FALSE(is_strictly_positive(CMatrix(2, 2), 0.0));
  CHECK(is_strictly_positive(CMatrix{{1.0, 0.999}, {0.999, 1.0}}, 0.0));
  CHECK_FALSE(is_strictly_positive(CMatrix{{1.0, 1.001}, {1.001, 1.0}}, 0.0));
  // The margin is relative to max(1, ||A||).
  CHECK_FALSE(is_strictly_positive(CMatrix::diag({1e-12, 1.0}), 1e-10));
  CHECK(error_kind_of([] { is_strictly_positive(CMatrix{{1.0, 2.0}, {0.0, 1.0}}); }) == ErrorKind::NonHermitianInput);
}

TEST_CASE("operator_norm") {
  CHECK(std::abs(operator_norm(CMatrix::identity(4)) - 1.0) < 1e-14);
  CHECK(std::abs(operator_norm(CMatrix{{0.0, 3.0}, {0.0, 0.0}}) - 3.0) < 1e-14);
  CHECK(std::abs(operator_norm(CMatrix::diag({3.0, 0.5})) - 3.0) < 1e-14);
  CHECK(operator_norm(CMatrix(3, 2)) == 0.0);
  // Rectangular: the 1x2 row (3, 4) has norm 5.
  CHECK(std::abs(operator_norm(CMatrix{{3.0, 4.0}}) - 5.0) < 1e-13);
}

TEST_CASE("inverse") {
  CHECK(max_abs_diff(inverse(CMatrix::identity(3)), CMatrix::identity(3)) == 0.0);
  CHECK(max_abs_diff(inverse(CMatrix::diag({2.0, 4.0})), CMatrix::diag({0.5, 0.25})) < 1e-15);
  CHECK(max_abs_diff(inverse(CMatrix{{1.0, 1.0}, {0.0, 1.0}}), CMatrix{{1.0, -1.0}, {0.0, 1.0}}) < 1e-15);
  CHECK(error_kind_of([] { inverse(CMatrix{{1.0, 2.0}, {2.0, 4.0}}); }) == ErrorKind::SingularMatrix);
  CHECK(error_kind_of([] { inverse(CMatrix(2, 3)); }) == ErrorKind::NotSquare);
  const CMatrix b{{1.0, 2.0}};
  const CMatrix a = CMatrix::diag({2.0, 4.0});
  CHECK(max_abs_diff(right_divide(b, a), CMatrix{{0.5, 0.5}}) < 1e-15);
}

TEST_CASE("psd_inv_sqrt") {
  CHECK(max_abs_diff(psd_inv_sqrt(CMatrix::identity(2)), CMatrix::identity(2)) < 1e-15);
  CHECK(max_abs_diff(psd_inv_sqrt(CMatrix::diag({4.0, 9.0})), CMatrix::diag({0.5, 1.0 / 3.0})) < 1e-15);
  // [[2,1],[1,2]] = 3 P₊ + 1 P₋ with P± = ½[[1, ±1], [±1, 1]], so S = P₊/√3 + P₋.
  const double s3 = 1.0 / std::sqrt(3.0);
  const CMatrix expected{{(s3 + 1.0) / 2.0, (s3 - 1.0) / 2.0}, {(s3 - 1.0) / 2.0, (s3 + 1.0) / 2.0}};
  const CMatrix a{{2.0, 1.0}, {1.0, 2.0}};
  const CMatrix s = psd_inv_sqrt(a);
  CHECK(max_abs_diff(s, expected) < 1e-14);
  CHECK(max_abs_diff(s * a * s, CMatrix::identity(2)) < 1e-14);
  CHECK(max_abs_diff(psd_sqrt(CMatrix::diag({4.0, 9.0})), CMatrix::diag({2.0, 3.0})) < 1e-15);
  CHECK(error_kind_of([] { psd_inv_sqrt(CMatrix::diag({1.0, -1.0})); }) == ErrorKind::NotPositiveDefinite);
  CHECK(error_kind_of([] { psd_inv_sqrt(CMatrix(2, 2)); }) == ErrorKind::NotPositiveDefinite);
}

TEST_CASE("general eigenvalues") {
  const auto nil = eigenvalues(CMatrix{{0.0, 3.0}, {0.0, 0.0}});
  REQUIRE(nil.size() == 2);
  for (auto z : nil) CHECK(std::abs(z) < 1e-12);
  // Rotation by 90°: ±i.
  auto rot = eigenvalues(CMatrix{{0.0, -1.0}, {1.0, 0.0}});
  REQUIRE(rot.size() == 2);
  CHECK(std::abs(std::abs(rot[0].imag()) - 1.0) < 1e-12);
  CHECK(std::abs(rot[0] + rot[1]) < 1e-12);
  const auto tri = eigenvalues(CMatrix{{1.0, 5.0, 2.0}, {0.0, cplx(0, 2), 7.0}, {0.0, 0.0, -3.0}});
  double found = 0;
  for (cplx target : {cplx(1.0), cplx(0, 2), cplx(-3.0)})
    for (auto z : tri)
      if (std::abs(z - target) < 1e-10) ++found;
  CHECK(found == 3);
}

TEST_CASE("matrix structure helpers") {
  const CMatrix a{{1.0, 2.0}, {3.0, 4.0}};
  CHECK(direct_sum(a, CMatrix::scalar(5.0)).rows() == 3);
  CHECK(direct_sum(a, CMatrix::scalar(5.0))(2, 2) == cplx(5.0));
  CHECK(kron(CMatrix::identity(2), a).block(2, 2, 2, 2) == a);
  CHECK(max_abs_diff(real_part(a) + cplx(0, 1) * imag_part(a), a) < 1e-15);
  CHECK(error_kind_of([] { CMatrix(2, 2) + CMatrix(2, 3); }) == ErrorKind::DimMismatch);
  CHECK(error_kind_of([] { CMatrix(2, 2) * CMatrix(3, 3); }) == ErrorKind::DimMismatch);
}

TEST_CASE("matrix JSON layout") {
  const CMatrix a{{1.0, cplx(0.0, -2.0)}, {0.5, 0.0}};
  const auto j = io::matrix_to_json(a);
  CHECK(j.at("rows") == 2);
  CHECK(j.at("cols") == 2);
  CHECK(j.at("data")[0][1][1] == -2.0);
  CHECK(io::matrix_from_json(j) == a);
  CHECK(error_kind_of([] { io::matrix_from_json(io::json::parse(R"({"rows":2,"cols":1,"data":[[1]]})")); }) ==
        ErrorKind::InvalidSpec);
}

TEST_CASE("matcore properties") { require_properties("matcore/"); }
