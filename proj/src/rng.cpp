#include "ncmetric/rng.hpp"

#include <cmath>
#include <numbers>

namespace ncm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_ + 0x632BE59BD9B4E019ULL));
  return splitmix64(key + 0x9E3779B97F4A7C15ULL * (++counter_));
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx CounterRng::complex_normal() { return cplx(normal(), normal()) / std::sqrt(2.0); }

CounterRng CounterRng::substream(std::uint64_t id) const {
  return CounterRng(seed_, splitmix64(stream_ * 0x2545F4914F6CDD1DULL + id + 1));
}

CMatrix random_complex(std::size_t rows, std::size_t cols, CounterRng& rng) {
  CMatrix m(rows, cols);
  for (auto& z : m.data()) z = rng.complex_normal();
  return m;
}

CMatrix random_hermitian(std::size_t n, CounterRng& rng) { return real_part(random_complex(n, n, rng)); }

CMatrix random_unitary(std::size_t n, CounterRng& rng) {
  CMatrix q = random_complex(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

}  // namespace ncm
