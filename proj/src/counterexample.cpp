#include "ncmetric/counterexample.hpp"

#include <algorithm>

#include "ncmetric/linalg.hpp"
#include "ncmetric/metric.hpp"
#include "ncmetric/rng.hpp"

namespace ncm {

MatrixConvexityCase matrix_convexity_counterexample() {
  MatrixConvexityCase out{DomainSpec(SpectralDisk{0.0, 1.0, {NormBound::Rule::Level, 1.0}}), CMatrix(4, 4),
                          CMatrix{{0.0, 3.0}, {0.0, 0.0}}, CMatrix(4, 2)};
  out.level4(0, 2) = 3.0;
  out.level4(1, 3) = 0.5;
  out.isometry(0, 0) = 1.0;
  out.isometry(2, 1) = 1.0;
  out.level4_inside = contains(out.domain, NcPoint::scalar_level(out.level4));
  out.level2_inside = contains(out.domain, NcPoint::scalar_level(out.level2));
  out.compression_gap = operator_norm(out.isometry.adjoint() * out.level4 * out.isometry - out.level2);
  return out;
}

BoundedTildeCase bounded_tilde_counterexample(std::uint64_t seed, std::size_t samples) {
  BoundedTildeCase out;
  out.disk = SpectralDisk{0.0, 0.25, {NormBound::Rule::Constant, 1.0}};
  const DomainSpec dom(out.disk);
  CounterRng rng(seed, 0xB0D1);
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t level = 1 + i % 3;
    const NcPoint a = sample_selfadjoint_in_disk(out.disk, level, rng);
    const NcPoint c = sample_selfadjoint_in_disk(out.disk, level, rng);
    const DeltaResult r = delta_tilde(dom, a, c, 1e-10);
    out.max_tilde = std::max(out.max_tilde, r.bracket_hi);
    ++out.samples;
  }
  out.ball_tilde = delta_tilde(KernelSpec::ball(), NcPoint::scalar(0.0), NcPoint::scalar(out.ball_radius)).value;
  return out;
}

}  // namespace ncm
