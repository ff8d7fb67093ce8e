#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ncmetric/matrix.hpp"
#include "ncmetric/ncpoint.hpp"

namespace ncm {

enum class ExpectationKind {
  /// B = ⊕ M_{k_i}; E keeps the diagonal blocks.
  Compression,
  /// B = ⊕ ℂ·I_{k_i}; E replaces each diagonal block by its normalized trace.
  BlockTrace,
};

/// (M_d, E, B, X) with X Hermitian and B block diagonal.
struct MatrixModel {
  CMatrix x;
  std::vector<std::size_t> blocks;
  ExpectationKind expectation = ExpectationKind::Compression;
};

enum class ScalarLawKind { Semicircle, Bernoulli, Arcsine, PointMass };

/// A law on ℝ with B = ℂ. Semicircle uses `variance`, PointMass uses `alpha`.
struct ScalarLaw {
  ScalarLawKind kind = ScalarLawKind::Semicircle;
  double variance = 1.0;
  double alpha = 0.0;
};

class OperatorValuedModel {
 public:
  using Variant = std::variant<MatrixModel, ScalarLaw>;

  OperatorValuedModel(Variant v);

  const Variant& variant() const noexcept { return v_; }
  std::size_t base_dim() const noexcept;
  std::string name() const;

 private:
  Variant v_;
};

/// ρ(b) = t·b with t ≥ 1.
struct ScalarPower {
  double t = 1.0;
};
/// ρ(b) = b + Σ V_i* b V_i with each V_i in B.
struct KrausAugment {
  std::vector<CMatrix> v;
};

class CpMapSpec {
 public:
  using Variant = std::variant<ScalarPower, KrausAugment>;

  CpMapSpec(Variant v);

  const Variant& variant() const noexcept { return v_; }

 private:
  Variant v_;
};

/// (Id_n ⊗ E) applied to an (n·d)×(n·d) matrix.
CMatrix expectation(const MatrixModel& m, const CMatrix& big);

/// True when every d×d block of `b` lies in B.
bool in_subalgebra(const OperatorValuedModel& model, const CMatrix& b, double tol = 1e-12);

/// G(b) = E[(b − I_n ⊗ X)^{-1}]. NotInHalfPlane unless Im b ≻ 0.
NcPoint cauchy_G(const OperatorValuedModel& model, const NcPoint& b);
/// Same without the half-plane precondition (block upper-triangular arguments).
CMatrix cauchy_G_unchecked(const OperatorValuedModel& model, const NcPoint& b);

struct FH {
  NcPoint f;
  NcPoint h;
};

/// F = G^{-1} and h = F − b.
FH F_and_h(const OperatorValuedModel& model, const NcPoint& b);
/// h without the half-plane precondition.
CMatrix h_unchecked(const OperatorValuedModel& model, const NcPoint& b);

/// (ρ − Id)(w) for w at level n over B.
CMatrix rho_minus_id(const CpMapSpec& rho, const CMatrix& w, std::size_t base_dim);

enum class DampingRule {
  /// Scalar secant relaxation α = −⟨Δw, Δd⟩⁻¹‖Δw‖², |α| ≤ 100.
  Secant,
  /// α halved on residual increase, reset to 1 on decrease.
  Halving,
};

struct SolveOptions {
  double tol = 1e-12;
  std::size_t max_iter = 200;
  DampingRule damping = DampingRule::Secant;
  bool throw_on_failure = true;
};

struct SolveTrace {
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> residuals;
  /// Per-step residual ratios r_{k+1}/r_k.
  std::vector<double> ratios;
  /// Pseudoball gauge of each iterate relative to the final ω.
  std::vector<double> gauges;
  /// λ_min(Im b): a lower bound for Im of the fixed-point map on the whole half-plane.
  double eps0 = 0.0;
  /// min over iterates of λ_min(Im of the mapped iterate); only a local estimate.
  double eps0_visited = 0.0;
  /// Geometric mean of the last ≤ 10 residual ratios.
  double tail_ratio = 0.0;
  /// 1 − ε₀·||(Im ω)^{-1}||. Equals provable_factor when Im ω is scalar.
  double theoretical_factor = 1.0;
  /// 1 − ε₀/||Im ω||, the factor that bounds the linearized map for matrix-valued Im ω.
  double provable_factor = 1.0;
  bool converged = false;
};

struct Subordination {
  NcPoint omega;
  SolveTrace trace;
};

/// Fixed point ω = b + (ρ − Id) h(ω) from ω₀ = b. MaxIterExceeded when the residual stays above tol
/// (unless throw_on_failure is false, in which case the best iterate is returned).
Subordination subordination_solve(const OperatorValuedModel& model, const CpMapSpec& rho, const NcPoint& b,
                                  const SolveOptions& opts = {});

/// G of the convolution power: G(ω(b)).
NcPoint convolved_G(const OperatorValuedModel& model, const CpMapSpec& rho, const NcPoint& b,
                    const SolveOptions& opts = {});

/// Scalar state φ applied to G: normalized trace or the normalized trace of one block.
struct StateSpec {
  std::optional<std::size_t> block;
};

struct DensityRow {
  double x = 0.0;
  double density = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double tail_ratio = 0.0;
  double theoretical_factor = 1.0;
  bool converged = false;
  std::optional<std::string> error;
};

/// −Im φ(G_ρ(x + iε))/π on an evenly spaced grid. Solver failures are recorded per row.
std::vector<DensityRow> density_grid(const OperatorValuedModel& model, const CpMapSpec& rho, double xmin,
                                     double xmax, double eps, std::size_t points, const StateSpec& state = {},
                                     const SolveOptions& opts = {});

/// Trapezoid mass of a density table.
double total_mass(const std::vector<DensityRow>& rows);

/// h₀(w) = b₀ + (ρ − Id) h(w).
struct H0Map {
  OperatorValuedModel model;
  CpMapSpec rho;
  NcPoint b0;

  CMatrix operator()(const NcPoint& w) const;
  /// λ_min(Im b₀), a lower bound for Im h₀.
  double eps0() const;
};

/// k₀(a) = −h₀(−a^{-1})^{-1}.
NcPoint k0(const H0Map& h0, const NcPoint& a);

struct K0Options {
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  /// Permits Im a ⪰ 0 (boundary case) with ten times the iteration budget.
  bool experimental = false;
};

struct K0FixedPoint {
  NcPoint x;
  std::size_t iterations = 0;
  double residual = 0.0;
  double eps0 = 0.0;
  /// max over iterates of ||k₀(w) − i/(2ε₀)|| − 1/(2ε₀); negative when every iterate was in range.
  double range_excess = 0.0;
};

/// Solves x = a + k₀(x) from x₀ = a + k₀(a + i).
K0FixedPoint k0_fixed_point(const H0Map& h0, const NcPoint& a, const K0Options& opts = {});

/// ||(Im a)^{-1/2}(a − c)(Im c)^{-1/2}||.
double halfplane_gauge(const NcPoint& a, const NcPoint& c);

/// Both sides of the strict Schwarz–Pick inequality for h₀:
/// lhs = ||(Im h₀(a))^{-1/2} Δh₀(a,c)(b) (Im h₀(c))^{-1/2}||²,
/// rhs = ||(Im a)^{-1/2} b (Im c)^{-1/2}||² (1 − ε₀||(Im h₀(a))^{-1}||)(1 − ε₀||(Im h₀(c))^{-1}||).
/// rhs_provable replaces ||(Im h₀)^{-1}|| by ||Im h₀||^{-1}; the two agree when Im h₀ is scalar, and only
/// rhs_provable is a valid bound for matrix-valued Im h₀.
struct StrictContraction {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_provable = 0.0;
};
StrictContraction h0_strict_contraction(const H0Map& h0, const NcPoint& a, const NcPoint& c, const NcDirection& b);

/// Gauss–Legendre nodes and weights on [−1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre_256();

}  // namespace ncm
