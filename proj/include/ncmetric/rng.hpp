#pragma once

#include <cstdint>
#include <limits>

#include "ncmetric/matrix.hpp"

namespace ncm {

/// Counter-based generator: the k-th draw of stream s under seed x is
/// splitmix64(x, s, k), so independent tasks can own disjoint streams and
/// results stay identical regardless of thread scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box–Muller).
  double normal();
  /// (N(0,1) + i N(0,1)) / √2.
  cplx complex_normal();

  CounterRng substream(std::uint64_t id) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

CMatrix random_complex(std::size_t rows, std::size_t cols, CounterRng& rng);
CMatrix random_hermitian(std::size_t n, CounterRng& rng);
/// Haar-ish unitary from Gram–Schmidt of a Gaussian matrix.
CMatrix random_unitary(std::size_t n, CounterRng& rng);

}  // namespace ncm
