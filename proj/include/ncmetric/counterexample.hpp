#pragma once

#include <cstddef>
#include <cstdint>

#include "ncmetric/domains.hpp"
#include "ncmetric/matrix.hpp"

namespace ncm {

/// {A : σ(A) ⊂ 𝔻, ||A|| < level}: a domain that is not matrix convex.
struct MatrixConvexityCase {
  DomainSpec domain;
  /// 4×4 point [[0, diag(3, 1/2)], [0, 0]] at level 4.
  CMatrix level4;
  /// [[0, 3], [0, 0]] at level 2, the compression S* level4 S with S = [e1, e3].
  CMatrix level2;
  CMatrix isometry;
  bool level4_inside = false;
  bool level2_inside = false;
  /// ||S* level4 S − level2||.
  double compression_gap = 0.0;
};

MatrixConvexityCase matrix_convexity_counterexample();

/// δ̃ stays bounded on a domain whose closure is far from its boundary, while it blows up on the ball.
struct BoundedTildeCase {
  SpectralDisk disk;
  std::size_t samples = 0;
  /// Largest upper bracket of δ̃ over self-adjoint sample pairs.
  double max_tilde = 0.0;
  double bound = 4.0 / 3.0;
  /// Ball δ̃(0, r) for r = 1 − 1e-3.
  double ball_radius = 0.999;
  double ball_tilde = 0.0;
};

/// Samples self-adjoint pairs of levels 1..3 in {σ(A) ⊂ ¼𝔻, ||A|| < 1}.
BoundedTildeCase bounded_tilde_counterexample(std::uint64_t seed, std::size_t samples = 200);

}  // namespace ncm
