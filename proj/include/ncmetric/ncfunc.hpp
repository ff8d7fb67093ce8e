#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ncmetric/matrix.hpp"
#include "ncmetric/ncpoint.hpp"

namespace ncm {

class NcFunctionSpec;

/// c0 + c1 z + c2 z² + ... evaluated by matrix substitution.
struct Polynomial {
  std::vector<cplx> coeffs;
};

/// b ↦ (b − α)(1 − ᾱb)^{-1}, an automorphism of the nc unit ball for |α| < 1.
struct MoebiusBall {
  cplx alpha;
};

/// b ↦ βb + γ.
struct Affine {
  cplx beta = 1.0;
  cplx gamma = 0.0;
};

enum class SeriesKind { Exp, Geometric, Log1p };

/// A scalar power series applied to matrices whose spectrum lies inside its disk of convergence.
struct ScalarCalculus {
  SeriesKind kind;
};

/// Applied left to right: parts[0] first.
struct Composition {
  std::vector<NcFunctionSpec> parts;
};

class NcFunctionSpec {
 public:
  using Variant = std::variant<Polynomial, MoebiusBall, Affine, ScalarCalculus, Composition>;

  NcFunctionSpec(Variant v);

  static NcFunctionSpec identity() { return NcFunctionSpec(Polynomial{{0.0, 1.0}}); }

  const Variant& variant() const noexcept { return v_; }

 private:
  Variant v_;
};

/// Truncation target for ScalarCalculus tails (absolute, below the 1e-12 contract).
inline constexpr double kSeriesTailTol = 1e-15;

CMatrix apply(const NcFunctionSpec& f, const CMatrix& x);
NcPoint eval(const NcFunctionSpec& f, const NcPoint& a);

/// Δf(a,c)(b): the (1,2) block of f([[a, b], [0, c]]).
NcDirection delta_f(const NcFunctionSpec& f, const NcPoint& a, const NcPoint& c, const NcDirection& b);

struct AxiomReport {
  double direct_sum = 0.0;
  double similarity = 0.0;
  double rectangular = 0.0;
  double permutation = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;

  double max_violation() const;
};

/// Direct-sum and intertwining checks over consecutive sample pairs. Similarity
/// intertwiners are drawn from `seed`. Violations are relative to max(1, ||f(a)||).
AxiomReport check_axioms(const NcFunctionSpec& f, std::span<const NcPoint> samples, std::uint64_t seed);

}  // namespace ncm
