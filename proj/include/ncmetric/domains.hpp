#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ncmetric/matrix.hpp"
#include "ncmetric/ncfunc.hpp"
#include "ncmetric/ncpoint.hpp"
#include "ncmetric/rng.hpp"

namespace ncm {

/// K(a,c)(P) = P − a P c*.
struct BallKernel {};
/// K(a,c)(P) = (a P − P c*) / 2i.
struct HalfPlaneKernel {};
/// K(a,c)(P) = P − g(a) P g(c)*.
struct ComposedBallKernel {
  NcFunctionSpec g;
};
/// K(a,c)(P) = (g(a) P − P g(c)*) / 2i.
struct ComposedHalfPlaneKernel {
  NcFunctionSpec g;
};

class KernelSpec {
 public:
  using Variant = std::variant<BallKernel, HalfPlaneKernel, ComposedBallKernel, ComposedHalfPlaneKernel>;

  KernelSpec(Variant v) : v_(std::move(v)) {}
  static KernelSpec ball() { return KernelSpec(BallKernel{}); }
  static KernelSpec halfplane() { return KernelSpec(HalfPlaneKernel{}); }

  const Variant& variant() const noexcept { return v_; }
  std::string name() const;

 private:
  Variant v_;
};

struct KernelDomain {
  KernelSpec kernel;
};

struct NormBound {
  enum class Rule { Constant, Level } rule = Rule::Constant;
  double value = 1.0;

  double at(std::size_t level) const { return rule == Rule::Level ? static_cast<double>(level) : value; }
};

/// {A : σ(A) inside the open disk, ||A|| < bound(level)}.
struct SpectralDisk {
  cplx center = 0.0;
  double radius = 1.0;
  NormBound bound;
};

/// {a : a^n = 0 at level n}, tested as ||a^n|| ≤ 1e-10·||a||^n.
struct NilpotentCone {};

class DomainSpec {
 public:
  using Variant = std::variant<KernelDomain, SpectralDisk, NilpotentCone>;

  DomainSpec(Variant v);
  static DomainSpec ball() { return DomainSpec(KernelDomain{KernelSpec::ball()}); }
  static DomainSpec halfplane() { return DomainSpec(KernelDomain{KernelSpec::halfplane()}); }

  const Variant& variant() const noexcept { return v_; }
  /// Kernel when the domain is a kernel domain.
  const KernelSpec* kernel() const noexcept;
  std::string name() const;

 private:
  Variant v_;
};

inline constexpr double kMembershipMargin = 1e-9;

/// K(a,c)(P). P must be (level(a)·d) × (level(c)·d).
CMatrix kernel_eval(const KernelSpec& k, const NcPoint& a, const NcPoint& c, const CMatrix& p);

/// Hermitian part of K(a,a)(I).
CMatrix kernel_diagonal(const KernelSpec& k, const NcPoint& a);

struct Membership {
  bool inside = false;
  /// Set when the test itself failed numerically; `inside` is then false.
  std::optional<std::string> diagnostic;
};

Membership test_membership(const DomainSpec& d, const NcPoint& a, double margin = kMembershipMargin);
bool contains(const DomainSpec& d, const NcPoint& a, double margin = kMembershipMargin);

struct KernelDiffs {
  CMatrix d0;   // n×m
  CMatrix d1;   // m×n
  CMatrix d01;  // n×n
};

/// Difference-differentials of K read off from one evaluation on block upper-triangular points.
KernelDiffs kernel_diffs(const KernelSpec& k, const NcPoint& a, const NcPoint& c, const NcDirection& b);

/// Random point in the domain at the given level. Ball: operator norm uniform in
/// [0, max_norm]. Half-plane: Im part ⪰ min_imag. Throws InvalidSpec for domains
/// without a sampler.
NcPoint sample_point(const DomainSpec& d, std::size_t base_dim, std::size_t level, CounterRng& rng,
                     double max_norm = 0.8);

/// Random self-adjoint point with spectrum inside the spectral disk (base_dim 1).
NcPoint sample_selfadjoint_in_disk(const SpectralDisk& disk, std::size_t level, CounterRng& rng);

NcDirection sample_direction(std::size_t base_dim, std::size_t row_level, std::size_t col_level,
                             CounterRng& rng, double norm = 1.0);

}  // namespace ncm
