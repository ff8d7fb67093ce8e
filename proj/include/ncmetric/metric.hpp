#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ncmetric/domains.hpp"
#include "ncmetric/ncfunc.hpp"
#include "ncmetric/ncpoint.hpp"

namespace ncm {

enum class DeltaMethod { Ray, ClosedBall, ClosedHalfPlane, Kernel };

std::string to_string(DeltaMethod m);

struct DeltaResult {
  double value = 0.0;  // may be +inf
  DeltaMethod method = DeltaMethod::Ray;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t iterations = 0;
  /// Ray search reached the cap with every probe inside the domain.
  bool zero_within_cap = false;
};

inline constexpr double kRayDefaultTol = 1e-6;
inline constexpr double kRayCap = 1e8;
inline constexpr double kRayFloor = 1e-12;

/// 1 / sup{t : [[a, s b], [0, c]] ∈ D for s ∈ [0, t]} by doubling from s = 1 and bisection.
DeltaResult delta_ray(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const NcDirection& b,
                      double tol = kRayDefaultTol, double margin = kMembershipMargin);

enum class ClosedKind { Ball, HalfPlane };

/// Ball: ||(1 − aa*)^{-1/2} b (1 − c*c)^{-1/2}||. Half-plane: ½||(Im a)^{-1/2} b (Im c)^{-1/2}||.
DeltaResult delta_closed(ClosedKind kind, const NcPoint& a, const NcPoint& c, const NcDirection& b);

/// Square root of the clipped top eigenvalue of the kernel operand built from kernel_diffs.
DeltaResult delta_kernel(const KernelSpec& k, const NcPoint& a, const NcPoint& c, const NcDirection& b);

/// Kernel formula on kernel domains, ray search otherwise.
DeltaResult delta_auto(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const NcDirection& b,
                       double tol = kRayDefaultTol);

/// δ̃(a, c) as the kernel formula at b = a − c. Exactly 0 at a = c and free of the cancellation in
/// the closed form when a and c are close.
DeltaResult delta_tilde(const KernelSpec& k, const NcPoint& a, const NcPoint& c);
/// δ̃(a, c) = max{0, λ_max(G(a,a)^{-1/2} K(a,c)(I) G(c,c)^{-1} K(c,a)(I) G(a,a)^{-1/2} − I)}^{1/2}
/// with G the Hermitian part of K(·,·)(I). Loses about half the digits as a → c.
DeltaResult delta_tilde_closed(const KernelSpec& k, const NcPoint& a, const NcPoint& c);
/// δ̃(a, c): kernel closed form on kernel domains, otherwise δ(a, c)(a − c) by ray search.
DeltaResult delta_tilde(const DomainSpec& d, const NcPoint& a, const NcPoint& c, double tol = kRayDefaultTol);

struct DivisionBound {
  double value = 0.0;                 // best bound found, +inf when every division was blocked
  std::vector<NcPoint> division;      // the division achieving `value`
  std::vector<double> level_values;   // raw straight-line sum with 2^k segments, k = 0..refinements
  std::vector<double> running_min;    // running minimum of level_values
  double after_perturbation = 0.0;    // value after coordinate descent on the best division
  std::size_t evaluations = 0;
  std::optional<std::string> diagnostic;
};

struct DivisionOptions {
  std::size_t refinements = 8;
  std::size_t perturbation_budget = 0;  // δ̃ evaluations spent on coordinate descent
  std::uint64_t seed = 0;
  double ray_tol = 1e-8;
};

/// Upper bound on the division distance d̃(a, c).
DivisionBound dtilde_upper(const DomainSpec& d, const NcPoint& a, const NcPoint& c,
                           const DivisionOptions& opts = {});

struct PathSample {
  double t;
  NcPoint point;
};

/// Piecewise-linear path; t strictly increasing from 0 to 1.
class Path {
 public:
  explicit Path(std::vector<PathSample> samples);
  static Path straight(const NcPoint& a, const NcPoint& c);

  const std::vector<PathSample>& samples() const noexcept { return samples_; }
  NcPoint at(double t) const;
  /// Chord derivative on the segment containing t.
  NcDirection derivative(double t) const;

 private:
  std::size_t segment(double t) const;
  std::vector<PathSample> samples_;
};

struct PathBound {
  double value = 0.0;
  double quadrature_error = 0.0;  // |I_Q − I_{Q/2}|
  std::size_t quad_points = 0;
};

/// Composite midpoint rule for ∫ δ(p(t), p(t))(p'(t)) dt along a piecewise-linear path.
PathBound d_upper(const DomainSpec& d, const Path& path, std::size_t quad_points = 256,
                  double ray_tol = 1e-8);

struct ContractionSample {
  NcPoint a;
  NcPoint c;
  NcDirection b;
};

struct ContractionReport {
  double max_excess = -std::numeric_limits<double>::infinity();  // max(lhs − rhs)
  double max_abs_gap = 0.0;                                      // max |lhs − rhs|
  std::size_t count = 0;
};

/// lhs = δ_dst(f(a), f(c))(Δf(a,c)(b)), rhs = δ_src(a, c)(b). MappingViolation when f leaves D_dst.
ContractionReport check_contraction(const NcFunctionSpec& f, const DomainSpec& src, const DomainSpec& dst,
                                    const std::vector<ContractionSample>& samples, double ray_tol = 1e-8);

struct NestingReport {
  double k = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();  // min of k·δ̃_inner − δ̃_outer
  std::size_t count = 0;
};

/// Checks k·δ̃_inner ≥ δ̃_outer with k = M/(m+M) over point pairs. NestingViolation when
/// the samples contradict M or m.
NestingReport compare_nested(const DomainSpec& inner, const DomainSpec& outer, double norm_bound, double gap,
                             const std::vector<std::pair<NcPoint, NcPoint>>& samples, std::uint64_t seed = 0);

}  // namespace ncm
