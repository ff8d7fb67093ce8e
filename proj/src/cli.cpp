#include "ncmetric/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncmetric/counterexample.hpp"
#include "ncmetric/domains.hpp"
#include "ncmetric/freeprob.hpp"
#include "ncmetric/json_io.hpp"
#include "ncmetric/linalg.hpp"
#include "ncmetric/metric.hpp"
#include "ncmetric/props.hpp"
#include "ncmetric/rng.hpp"

namespace ncm::cli {

using io::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MappingViolation:
    case ErrorKind::NestingViolation:
      return kExitViolation;
    case ErrorKind::InvalidSpec:
    case ErrorKind::DimMismatch:
    case ErrorKind::BaseDimMismatch:
    case ErrorKind::NotSquare:
    case ErrorKind::NonHermitianInput:
    case ErrorKind::NotUnitary:
    case ErrorKind::PointOutsideDomain:
    case ErrorKind::NotInHalfPlane:
      return kExitInput;
    default:
      return kExitNumerical;
  }
}

namespace {

// A path to a JSON file, inline JSON, or a bare variant name such as "ball".
json load_arg(const std::string& value) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(value, ec)) return io::read_json_file(value);
  const auto first = value.find_first_not_of(" \t\n");
  if (first != std::string::npos && std::string("{[-+.0123456789").find(value[first]) != std::string::npos) {
    try {
      return json::parse(value);
    } catch (const json::exception& e) {
      throw NcError(ErrorKind::InvalidSpec, "cannot parse '" + value + "': " + e.what());
    }
  }
  return json{{"variant", value}};
}

bool is_scalar_json(const json& j) { return j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()); }

NcPoint load_point(const std::string& value) {
  const json j = load_arg(value);
  if (is_scalar_json(j)) return NcPoint::scalar(io::complex_from_json(j));
  return io::point_from_json(j);
}

NcDirection load_direction(const std::string& value) {
  const json j = load_arg(value);
  if (is_scalar_json(j)) return NcDirection::scalar(io::complex_from_json(j));
  return io::direction_from_json(j);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) out << text;
  else io::write_text_file(path, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::optional<ClosedKind> closed_kind(const DomainSpec& d) {
  const KernelSpec* k = d.kernel();
  if (!k) return std::nullopt;
  if (std::holds_alternative<BallKernel>(k->variant())) return ClosedKind::Ball;
  if (std::holds_alternative<HalfPlaneKernel>(k->variant())) return ClosedKind::HalfPlane;
  return std::nullopt;
}

std::vector<DeltaResult> all_methods(const DomainSpec& d, const NcPoint& a, const NcPoint& c, const NcDirection& b,
                                     double tol) {
  std::vector<DeltaResult> rs{delta_ray(d, a, c, b, tol)};
  if (auto kind = closed_kind(d)) rs.push_back(delta_closed(*kind, a, c, b));
  if (const KernelSpec* k = d.kernel()) rs.push_back(delta_kernel(*k, a, c, b));
  return rs;
}

std::string delta_csv_row(std::size_t level, const DeltaResult& r) {
  return std::to_string(level) + "," + to_string(r.method) + "," + io::format_double(r.value) + "," +
         io::format_double(r.bracket_lo) + "," + io::format_double(r.bracket_hi) + "," +
         std::to_string(r.iterations) + "\n";
}

bool wants_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

// ---------------------------------------------------------------- subcommands

struct DeltaArgs {
  std::string domain = "ball", a, c, b, out;
  double tol = kRayDefaultTol;
  std::uint64_t seed = 7;
  std::vector<std::size_t> levels{1, 2, 3};
  std::size_t samples = 5, base_dim = 1;
};

int cmd_delta(const DeltaArgs& args, std::ostream& out) {
  const DomainSpec d = io::domain_from_json(load_arg(args.domain));
  const std::string header = "level,method,value,bracket_lo,bracket_hi,iterations\n";
  if (!args.a.empty()) {
    const NcPoint a = load_point(args.a);
    const NcPoint c = args.c.empty() ? a : load_point(args.c);
    const NcDirection b = args.b.empty() ? NcDirection::difference(a, c) : load_direction(args.b);
    const auto rs = all_methods(d, a, c, b, args.tol);
    if (wants_csv(args.out)) {
      std::string csv = header;
      for (const auto& r : rs) csv += delta_csv_row(a.level(), r);
      emit(csv, args.out, out);
      return kExitOk;
    }
    json j{{"domain", io::domain_to_json(d)}, {"a", io::point_to_json(a)}, {"c", io::point_to_json(c)},
           {"b", io::direction_to_json(b)}, {"tol", args.tol}};
    json methods = json::object();
    for (const auto& r : rs) methods[to_string(r.method)] = io::delta_to_json(r);
    j["results"] = methods;
    if (a.level() == c.level()) j["tilde"] = io::delta_to_json(delta_tilde(d, a, c, args.tol));
    emit(dump(j), args.out, out);
    return kExitOk;
  }
  CounterRng rng(args.seed, 0xD17A);
  std::string csv = header;
  for (std::size_t level : args.levels) {
    if (level == 0) throw NcError(ErrorKind::InvalidSpec, "levels must be positive");
    for (std::size_t s = 0; s < args.samples; ++s) {
      const NcPoint a = sample_point(d, args.base_dim, level, rng);
      const NcPoint c = sample_point(d, args.base_dim, level, rng);
      const NcDirection b = sample_direction(args.base_dim, level, level, rng);
      for (const auto& r : all_methods(d, a, c, b, args.tol)) csv += delta_csv_row(level, r);
    }
  }
  emit(csv, args.out, out);
  return kExitOk;
}

struct DistanceArgs {
  std::string domain = "ball", a, c, out;
  std::size_t refinements = 8, budget = 0, quad = 256;
  std::uint64_t seed = 7;
  double tol = 1e-8;
};

int cmd_distance(const DistanceArgs& args, std::ostream& out) {
  const DomainSpec d = io::domain_from_json(load_arg(args.domain));
  const NcPoint a = load_point(args.a), c = load_point(args.c);
  DivisionOptions opts;
  opts.refinements = args.refinements;
  opts.perturbation_budget = args.budget;
  opts.seed = args.seed;
  opts.ray_tol = args.tol;
  const DivisionBound div = dtilde_upper(d, a, c, opts);
  json division = json::array(), levels = json::array(), running = json::array();
  for (const auto& p : div.division) division.push_back(io::point_to_json(p));
  for (double v : div.level_values) levels.push_back(io::number_to_json(v));
  for (double v : div.running_min) running.push_back(io::number_to_json(v));
  json j{{"domain", io::domain_to_json(d)},
         {"a", io::point_to_json(a)},
         {"c", io::point_to_json(c)},
         {"tilde", io::delta_to_json(delta_tilde(d, a, c, args.tol))},
         {"dtilde_upper",
          {{"value", io::number_to_json(div.value)},
           {"level_values", levels},
           {"running_min", running},
           {"after_perturbation", io::number_to_json(div.after_perturbation)},
           {"evaluations", div.evaluations},
           {"diagnostic", div.diagnostic ? json(*div.diagnostic) : json(nullptr)},
           {"division", division}}}};
  const Path path = Path::straight(a, c);
  json path_json = json::array();
  for (const auto& s : path.samples()) path_json.push_back({{"t", s.t}, {"point", io::point_to_json(s.point)}});
  try {
    const PathBound pb = d_upper(d, path, args.quad, args.tol);
    j["d_upper"] = {{"value", io::number_to_json(pb.value)},
                    {"quadrature_error", io::number_to_json(pb.quadrature_error)},
                    {"quad_points", pb.quad_points},
                    {"path", path_json}};
  } catch (const NcError& e) {
    if (e.kind() != ErrorKind::PathBlocked) throw;
    j["d_upper"] = {{"value", "inf"}, {"error", e.what()}, {"path", path_json}};
  }
  emit(dump(j), args.out, out);
  return kExitOk;
}

struct ContractArgs {
  std::string function, src = "ball", dst, out;
  std::size_t samples = 50;
  std::vector<std::size_t> levels{1, 2, 3};
  std::size_t base_dim = 1;
  std::uint64_t seed = 7;
  bool equality = false;
  double tol = -1.0;
};

int cmd_contract(const ContractArgs& args, std::ostream& out, std::ostream& err) {
  const NcFunctionSpec f = io::function_from_json(load_arg(args.function));
  const DomainSpec src = io::domain_from_json(load_arg(args.src));
  const DomainSpec dst = args.dst.empty() ? src : io::domain_from_json(load_arg(args.dst));
  const double slack = args.tol >= 0.0 ? args.tol : (args.equality ? 1e-6 : 1e-7);
  CounterRng rng(args.seed, 0xC0A7);
  std::vector<ContractionSample> samples;
  for (std::size_t i = 0; i < args.samples; ++i) {
    const std::size_t n = args.levels[i % args.levels.size()];
    const std::size_t m = args.levels[(i / args.levels.size()) % args.levels.size()];
    samples.push_back({sample_point(src, args.base_dim, n, rng), sample_point(src, args.base_dim, m, rng),
                       sample_direction(args.base_dim, n, m, rng)});
  }
  const ContractionReport rep = check_contraction(f, src, dst, samples);
  const double measured = args.equality ? rep.max_abs_gap : rep.max_excess;
  const bool pass = measured <= slack;
  json j{{"function", io::function_to_json(f)},
         {"src", io::domain_to_json(src)},
         {"dst", io::domain_to_json(dst)},
         {"mode", args.equality ? "equality" : "contraction"},
         {"count", rep.count},
         {"max_excess", io::number_to_json(rep.max_excess)},
         {"max_abs_gap", io::number_to_json(rep.max_abs_gap)},
         {"slack", slack},
         {"pass", pass}};
  emit(dump(j), args.out, out);
  if (!pass) err << "contraction check failed: " << io::format_double(measured) << " > " << slack << "\n";
  return pass ? kExitOk : kExitViolation;
}

struct ConvolveArgs {
  std::string law = "semicircle", model, rho, state = "trace", damping = "secant", out;
  double variance = 1.0, alpha = 0.0, rho_t = 2.0;
  double xmin = -3.0, xmax = 3.0, eps = 1e-2, tol = 1e-12;
  std::size_t points = 201, max_iter = 200;
};

int cmd_convolve(const ConvolveArgs& args, std::ostream& out, std::ostream& err) {
  const OperatorValuedModel model = [&] {
    if (!args.model.empty()) return io::model_from_json(load_arg(args.model));
    json j{{"variant", args.law}};
    if (args.law == "semicircle") j["variance"] = args.variance;
    if (args.law == "point_mass") j["alpha"] = args.alpha;
    return io::model_from_json(j);
  }();
  const CpMapSpec rho = args.rho.empty() ? CpMapSpec(ScalarPower{args.rho_t}) : io::cpmap_from_json(load_arg(args.rho));
  StateSpec state;
  if (args.state != "trace") {
    try {
      state.block = std::stoul(args.state);
    } catch (const std::exception&) {
      throw NcError(ErrorKind::InvalidSpec, "--state must be 'trace' or a block index");
    }
  }
  SolveOptions opts;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;
  if (args.damping == "secant") opts.damping = DampingRule::Secant;
  else if (args.damping == "halving") opts.damping = DampingRule::Halving;
  else throw NcError(ErrorKind::InvalidSpec, "--damping must be secant or halving");
  if (!(args.eps > 0.0)) throw NcError(ErrorKind::InvalidSpec, "--eps must be positive");
  if (args.points < 2 || !(args.xmax > args.xmin)) throw NcError(ErrorKind::InvalidSpec, "empty grid");

  const auto rows = density_grid(model, rho, args.xmin, args.xmax, args.eps, args.points, state, opts);
  std::string csv = "x,density,residual,iterations,error\n";
  std::size_t failed = 0;
  for (const auto& r : rows) {
    csv += io::format_double(r.x) + "," + io::format_double(r.density) + "," + io::format_double(r.residual) + "," +
           std::to_string(r.iterations) + "," + (r.error ? csv_field(*r.error) : std::string()) + "\n";
    if (r.error || !r.converged) ++failed;
  }
  emit(csv, args.out, out);
  err << "mass " << io::format_double(total_mass(rows)) << ", rows " << rows.size() << ", failed " << failed << "\n";
  return failed == rows.size() ? kExitNumerical : kExitOk;
}

struct PropsArgs {
  std::uint64_t seed = 7;
  std::string filter, out;
};

int cmd_props(const PropsArgs& args, std::ostream& out) {
  const auto results = run_properties(args.seed, args.filter);
  emit(format_report(results), args.out, out);
  for (const auto& r : results)
    if (!r.pass) return kExitViolation;
  return kExitOk;
}

struct CounterexampleArgs {
  std::uint64_t seed = 7;
  std::size_t samples = 200;
  std::string out;
};

std::string matrix_text(const CMatrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + io::format_double(m(i, j).real());
    s += "]";
  }
  return s + "]";
}

int cmd_counterexample(const CounterexampleArgs& args, std::ostream& out) {
  const MatrixConvexityCase mc = matrix_convexity_counterexample();
  const BoundedTildeCase bt = bounded_tilde_counterexample(args.seed, args.samples);
  std::ostringstream s;
  s << "domain {sigma(A) in unit disk, ||A|| < level}\n";
  s << "level4 " << matrix_text(mc.level4) << " inside " << (mc.level4_inside ? "true" : "false") << "\n";
  s << "level2 " << matrix_text(mc.level2) << " inside " << (mc.level2_inside ? "true" : "false") << "\n";
  s << "level2 = S* level4 S with S = [e1, e3]: gap " << io::format_double(mc.compression_gap) << "\n";
  const bool convexity_ok = mc.level4_inside && !mc.level2_inside && mc.compression_gap == 0.0;
  s << "not matrix convex " << (convexity_ok ? "true" : "false") << "\n";
  const bool bounded_ok = bt.max_tilde <= bt.bound + 1e-9;
  s << "spectral disk radius " << io::format_double(bt.disk.radius) << " norm bound "
    << io::format_double(bt.disk.bound.value) << ": max tilde " << io::format_double(bt.max_tilde) << " over "
    << bt.samples << " self-adjoint pairs, bound " << io::format_double(bt.bound) << " holds "
    << (bounded_ok ? "true" : "false") << "\n";
  const bool blowup_ok = bt.ball_tilde > 10.0;
  s << "ball tilde(0, " << io::format_double(bt.ball_radius) << ") " << io::format_double(bt.ball_tilde)
    << " exceeds 10 " << (blowup_ok ? "true" : "false") << "\n";
  emit(s.str(), args.out, out);
  return convexity_ok && bounded_ok && blowup_ok ? kExitOk : kExitViolation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noncommutative pseudometrics and operator-valued free convolution"};
  app.require_subcommand(1);

  DeltaArgs da;
  auto* delta = app.add_subcommand("delta", "delta_D(a,c)(b) by every applicable method");
  delta->add_option("--domain,--kernel", da.domain, "domain JSON file, inline JSON or variant name")
      ->capture_default_str();
  delta->add_option("--a", da.a, "point a (JSON file, inline JSON or scalar); omit to sample");
  delta->add_option("--c", da.c, "point c (defaults to a)");
  delta->add_option("--b", da.b, "direction b (defaults to a - c)");
  delta->add_option("--tol", da.tol, "relative ray tolerance")->capture_default_str();
  delta->add_option("--seed", da.seed, "sampling seed")->capture_default_str();
  delta->add_option("--levels", da.levels, "levels to sample")->delimiter(',');
  delta->add_option("--samples", da.samples, "samples per level")->capture_default_str();
  delta->add_option("--base-dim", da.base_dim, "base algebra size for sampling")->capture_default_str();
  delta->add_option("--out", da.out, "output path (.csv for a table, else JSON)");

  DistanceArgs di;
  auto* distance = app.add_subcommand("distance", "division and path upper bounds between two points");
  distance->add_option("--domain,--kernel", di.domain, "domain")->capture_default_str();
  distance->add_option("--a", di.a, "start point")->required();
  distance->add_option("--c", di.c, "end point")->required();
  distance->add_option("--refinements", di.refinements, "divisions with 2^k segments, k up to this")
      ->capture_default_str();
  distance->add_option("--budget", di.budget, "coordinate-descent evaluations")->capture_default_str();
  distance->add_option("--quad", di.quad, "midpoint quadrature points")->capture_default_str();
  distance->add_option("--seed", di.seed, "perturbation seed")->capture_default_str();
  distance->add_option("--tol", di.tol, "ray tolerance off kernel domains")->capture_default_str();
  distance->add_option("--out", di.out, "JSON output path");

  ContractArgs ca;
  auto* contract = app.add_subcommand("contract", "Schwarz-Pick check of an nc function between domains");
  contract->add_option("--function", ca.function, "function JSON")->required();
  contract->add_option("--src", ca.src, "source domain")->capture_default_str();
  contract->add_option("--dst", ca.dst, "target domain (defaults to source)");
  contract->add_option("--samples", ca.samples, "sample count")->capture_default_str();
  contract->add_option("--levels", ca.levels, "levels to sample")->delimiter(',');
  contract->add_option("--base-dim", ca.base_dim, "base algebra size")->capture_default_str();
  contract->add_option("--seed", ca.seed, "sampling seed")->capture_default_str();
  contract->add_flag("--equality", ca.equality, "require equality instead of contraction");
  contract->add_option("--tol", ca.tol, "slack (default 1e-7, or 1e-6 with --equality)");
  contract->add_option("--out", ca.out, "JSON output path");

  ConvolveArgs co;
  auto* convolve = app.add_subcommand("convolve", "density of a free convolution power on a grid");
  convolve->add_option("--law", co.law, "semicircle, bernoulli, arcsine or point_mass")->capture_default_str();
  convolve->add_option("--model", co.model, "operator-valued model JSON (overrides --law)");
  convolve->add_option("--variance", co.variance, "semicircle variance")->capture_default_str();
  convolve->add_option("--alpha", co.alpha, "point mass location")->capture_default_str();
  convolve->add_option("--rho-t", co.rho_t, "rho(b) = t b")->capture_default_str();
  convolve->add_option("--rho", co.rho, "cp map JSON (overrides --rho-t)");
  convolve->add_option("--xmin", co.xmin, "grid start")->capture_default_str();
  convolve->add_option("--xmax", co.xmax, "grid end")->capture_default_str();
  convolve->add_option("--eps", co.eps, "distance from the real axis")->capture_default_str();
  convolve->add_option("--points", co.points, "grid points")->capture_default_str();
  convolve->add_option("--state", co.state, "'trace' or a block index")->capture_default_str();
  convolve->add_option("--damping", co.damping, "secant or halving")->capture_default_str();
  convolve->add_option("--max-iter", co.max_iter, "iteration cap per point")->capture_default_str();
  convolve->add_option("--tol", co.tol, "residual tolerance")->capture_default_str();
  convolve->add_option("--out", co.out, "CSV output path");

  PropsArgs pa;
  auto* props = app.add_subcommand("props", "run the invariant suite");
  props->add_option("--seed", pa.seed, "run seed")->capture_default_str();
  props->add_option("--filter", pa.filter, "only properties whose module/name contains this");
  props->add_option("--out", pa.out, "report path");

  CounterexampleArgs ce;
  auto* counter = app.add_subcommand("counterexample", "matrix convexity and bounded-tilde counterexamples");
  counter->add_option("--seed", ce.seed, "sampling seed")->capture_default_str();
  counter->add_option("--samples", ce.samples, "self-adjoint pairs")->capture_default_str();
  counter->add_option("--out", ce.out, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (delta->parsed()) return cmd_delta(da, out);
    if (distance->parsed()) return cmd_distance(di, out);
    if (contract->parsed()) return cmd_contract(ca, out, err);
    if (convolve->parsed()) return cmd_convolve(co, out, err);
    if (props->parsed()) return cmd_props(pa, out);
    if (counter->parsed()) return cmd_counterexample(ce, out);
  } catch (const NcError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace ncm::cli
