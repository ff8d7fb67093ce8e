#include "ncmetric/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ncmetric/error.hpp"

namespace ncm::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw NcError(ErrorKind::InvalidSpec, std::string(what) + ": " + e.what());
  }
}

std::string variant_of(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string())
    throw NcError(ErrorKind::InvalidSpec, std::string(what) + ": missing \"variant\" tag");
  return j.at("variant").get<std::string>();
}

[[noreturn]] void unknown_variant(const char* what, const std::string& v) {
  throw NcError(ErrorKind::InvalidSpec, std::string(what) + ": unknown variant \"" + v + "\"");
}

std::size_t count_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw NcError(ErrorKind::InvalidSpec, std::string("field \"") + key + "\" must be a nonnegative integer");
  return v.get<std::size_t>();
}

const char* series_name(SeriesKind k) {
  switch (k) {
    case SeriesKind::Exp: return "exp";
    case SeriesKind::Geometric: return "geometric";
    case SeriesKind::Log1p: return "log1p";
  }
  return "exp";
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NcError(ErrorKind::InvalidSpec, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw NcError(ErrorKind::InvalidSpec, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NcError(ErrorKind::InvalidSpec, "cannot write " + path);
  out << text;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  return guarded("complex", [&] {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return cplx(j[0].get<double>(), j[1].get<double>());
    throw NcError(ErrorKind::InvalidSpec, "complex numbers are [re, im] pairs");
  });
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

CMatrix matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    const std::size_t r = count_field(j, "rows"), c = count_field(j, "cols");
    const json& data = j.at("data");
    if (!data.is_array() || data.size() != r) throw NcError(ErrorKind::InvalidSpec, "matrix: data must have `rows` rows");
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (!data[i].is_array() || data[i].size() != c)
        throw NcError(ErrorKind::InvalidSpec, "matrix: every row must have `cols` entries");
      for (std::size_t k = 0; k < c; ++k) m(i, k) = complex_from_json(data[i][k]);
    }
    return m;
  });
}

json point_to_json(const NcPoint& p) {
  return json{{"base_dim", p.base_dim()}, {"level", p.level()}, {"mat", matrix_to_json(p.mat())}};
}

NcPoint point_from_json(const json& j) {
  return guarded("point", [&] {
    return NcPoint(count_field(j, "base_dim"), count_field(j, "level"), matrix_from_json(j.at("mat")));
  });
}

json direction_to_json(const NcDirection& b) {
  return json{{"base_dim", b.base_dim()},
              {"row_level", b.row_level()},
              {"col_level", b.col_level()},
              {"mat", matrix_to_json(b.mat())}};
}

NcDirection direction_from_json(const json& j) {
  return guarded("direction", [&] {
    return NcDirection(count_field(j, "base_dim"), count_field(j, "row_level"), count_field(j, "col_level"),
                       matrix_from_json(j.at("mat")));
  });
}

json function_to_json(const NcFunctionSpec& f) {
  return std::visit(overloaded{
                        [](const Polynomial& p) {
                          json c = json::array();
                          for (auto z : p.coeffs) c.push_back(complex_to_json(z));
                          return json{{"variant", "polynomial"}, {"coeffs", c}};
                        },
                        [](const MoebiusBall& m) {
                          return json{{"variant", "moebius_ball"}, {"alpha", complex_to_json(m.alpha)}};
                        },
                        [](const Affine& a) {
                          return json{{"variant", "affine"},
                                      {"beta", complex_to_json(a.beta)},
                                      {"gamma", complex_to_json(a.gamma)}};
                        },
                        [](const ScalarCalculus& s) {
                          return json{{"variant", "scalar_calculus"}, {"function", series_name(s.kind)}};
                        },
                        [](const Composition& c) {
                          json parts = json::array();
                          for (const auto& p : c.parts) parts.push_back(function_to_json(p));
                          return json{{"variant", "composition"}, {"parts", parts}};
                        },
                    },
                    f.variant());
}

NcFunctionSpec function_from_json(const json& j) {
  if (j.is_array()) {
    Composition c;
    for (const auto& p : j) c.parts.push_back(function_from_json(p));
    return guarded("function", [&] { return NcFunctionSpec(std::move(c)); });
  }
  const std::string v = variant_of(j, "function");
  return guarded("function", [&]() -> NcFunctionSpec {
    if (v == "polynomial") {
      Polynomial p;
      for (const auto& c : j.at("coeffs")) p.coeffs.push_back(complex_from_json(c));
      return NcFunctionSpec(std::move(p));
    }
    if (v == "moebius_ball") return NcFunctionSpec(MoebiusBall{complex_from_json(j.at("alpha"))});
    if (v == "affine" || v == "cayley_like") {
      Affine a;
      if (j.contains("beta")) a.beta = complex_from_json(j.at("beta"));
      if (j.contains("gamma")) a.gamma = complex_from_json(j.at("gamma"));
      return NcFunctionSpec(a);
    }
    if (v == "scalar_calculus") {
      const std::string fn = j.at("function").get<std::string>();
      if (fn == "exp") return NcFunctionSpec(ScalarCalculus{SeriesKind::Exp});
      if (fn == "geometric") return NcFunctionSpec(ScalarCalculus{SeriesKind::Geometric});
      if (fn == "log1p") return NcFunctionSpec(ScalarCalculus{SeriesKind::Log1p});
      throw NcError(ErrorKind::InvalidSpec, "scalar_calculus function must be exp, geometric or log1p");
    }
    if (v == "composition") {
      Composition c;
      for (const auto& p : j.at("parts")) c.parts.push_back(function_from_json(p));
      return NcFunctionSpec(std::move(c));
    }
    unknown_variant("function", v);
  });
}

json kernel_to_json(const KernelSpec& k) {
  return std::visit(overloaded{
                        [](const BallKernel&) { return json{{"variant", "ball"}}; },
                        [](const HalfPlaneKernel&) { return json{{"variant", "halfplane"}}; },
                        [](const ComposedBallKernel& c) {
                          return json{{"variant", "composed_ball"}, {"g", function_to_json(c.g)}};
                        },
                        [](const ComposedHalfPlaneKernel& c) {
                          return json{{"variant", "composed_halfplane"}, {"g", function_to_json(c.g)}};
                        },
                    },
                    k.variant());
}

KernelSpec kernel_from_json(const json& j) {
  const std::string v = variant_of(j, "kernel");
  return guarded("kernel", [&]() -> KernelSpec {
    if (v == "ball") return KernelSpec::ball();
    if (v == "halfplane" || v == "half_plane") return KernelSpec::halfplane();
    if (v == "composed_ball") return KernelSpec(ComposedBallKernel{function_from_json(j.at("g"))});
    if (v == "composed_halfplane") return KernelSpec(ComposedHalfPlaneKernel{function_from_json(j.at("g"))});
    unknown_variant("kernel", v);
  });
}

json domain_to_json(const DomainSpec& d) {
  return std::visit(overloaded{
                        [](const KernelDomain& k) { return json{{"variant", "kernel"}, {"kernel", kernel_to_json(k.kernel)}}; },
                        [](const SpectralDisk& s) {
                          json bound = s.bound.rule == NormBound::Rule::Level
                                           ? json{{"rule", "level"}}
                                           : json{{"rule", "constant"}, {"value", s.bound.value}};
                          return json{{"variant", "spectral_disk"},
                                      {"center", complex_to_json(s.center)},
                                      {"radius", s.radius},
                                      {"norm_bound", bound}};
                        },
                        [](const NilpotentCone&) { return json{{"variant", "nilpotent"}}; },
                    },
                    d.variant());
}

DomainSpec domain_from_json(const json& j) {
  const std::string v = variant_of(j, "domain");
  return guarded("domain", [&]() -> DomainSpec {
    if (v == "kernel") return DomainSpec(KernelDomain{kernel_from_json(j.at("kernel"))});
    if (v == "ball" || v == "halfplane" || v == "half_plane" || v == "composed_ball" || v == "composed_halfplane")
      return DomainSpec(KernelDomain{kernel_from_json(j)});
    if (v == "spectral_disk") {
      SpectralDisk s;
      if (j.contains("center")) s.center = complex_from_json(j.at("center"));
      s.radius = j.at("radius").get<double>();
      if (j.contains("norm_bound")) {
        const json& nb = j.at("norm_bound");
        const std::string rule = nb.at("rule").get<std::string>();
        if (rule == "level") {
          s.bound.rule = NormBound::Rule::Level;
        } else if (rule == "constant") {
          s.bound.rule = NormBound::Rule::Constant;
          s.bound.value = nb.at("value").get<double>();
        } else {
          throw NcError(ErrorKind::InvalidSpec, "norm_bound rule must be constant or level");
        }
      }
      return DomainSpec(s);
    }
    if (v == "nilpotent") return DomainSpec(NilpotentCone{});
    unknown_variant("domain", v);
  });
}

json model_to_json(const OperatorValuedModel& m) {
  return std::visit(overloaded{
                        [](const MatrixModel& mm) {
                          return json{{"variant", "matrix"},
                                      {"X", matrix_to_json(mm.x)},
                                      {"blocks", mm.blocks},
                                      {"expectation", mm.expectation == ExpectationKind::Compression
                                                          ? "compression"
                                                          : "block_trace"}};
                        },
                        [&](const ScalarLaw& l) {
                          json j{{"variant", m.name()}};
                          if (l.kind == ScalarLawKind::Semicircle) j["variance"] = l.variance;
                          if (l.kind == ScalarLawKind::PointMass) j["alpha"] = l.alpha;
                          return j;
                        },
                    },
                    m.variant());
}

OperatorValuedModel model_from_json(const json& j) {
  const std::string v = variant_of(j, "model");
  return guarded("model", [&]() -> OperatorValuedModel {
    if (v == "matrix") {
      MatrixModel mm;
      mm.x = matrix_from_json(j.at("X"));
      mm.blocks = j.at("blocks").get<std::vector<std::size_t>>();
      if (j.contains("expectation")) {
        const std::string e = j.at("expectation").get<std::string>();
        if (e == "compression") mm.expectation = ExpectationKind::Compression;
        else if (e == "block_trace") mm.expectation = ExpectationKind::BlockTrace;
        else throw NcError(ErrorKind::InvalidSpec, "expectation must be compression or block_trace");
      }
      return OperatorValuedModel(std::move(mm));
    }
    ScalarLaw l;
    if (v == "semicircle") {
      l.kind = ScalarLawKind::Semicircle;
      if (j.contains("variance")) l.variance = j.at("variance").get<double>();
    } else if (v == "bernoulli") {
      l.kind = ScalarLawKind::Bernoulli;
    } else if (v == "arcsine") {
      l.kind = ScalarLawKind::Arcsine;
    } else if (v == "point_mass") {
      l.kind = ScalarLawKind::PointMass;
      if (j.contains("alpha")) l.alpha = j.at("alpha").get<double>();
    } else {
      unknown_variant("model", v);
    }
    return OperatorValuedModel(l);
  });
}

json cpmap_to_json(const CpMapSpec& r) {
  return std::visit(overloaded{
                        [](const ScalarPower& p) { return json{{"variant", "scalar_power"}, {"t", p.t}}; },
                        [](const KrausAugment& k) {
                          json vs = json::array();
                          for (const auto& v : k.v) vs.push_back(matrix_to_json(v));
                          return json{{"variant", "kraus"}, {"V", vs}};
                        },
                    },
                    r.variant());
}

CpMapSpec cpmap_from_json(const json& j) {
  const std::string v = variant_of(j, "cp map");
  return guarded("cp map", [&]() -> CpMapSpec {
    if (v == "scalar_power") return CpMapSpec(ScalarPower{j.at("t").get<double>()});
    if (v == "kraus") {
      KrausAugment k;
      for (const auto& m : j.at("V")) k.v.push_back(matrix_from_json(m));
      return CpMapSpec(std::move(k));
    }
    unknown_variant("cp map", v);
  });
}

json delta_to_json(const DeltaResult& r) {
  return json{{"value", number_to_json(r.value)},
              {"method", to_string(r.method)},
              {"bracket", json::array({number_to_json(r.bracket_lo), number_to_json(r.bracket_hi)})},
              {"iterations", r.iterations},
              {"zero_within_cap", r.zero_within_cap}};
}

json trace_to_json(const SolveTrace& t) {
  json res = json::array(), ratios = json::array(), gauges = json::array();
  for (double v : t.residuals) res.push_back(number_to_json(v));
  for (double v : t.ratios) ratios.push_back(number_to_json(v));
  for (double v : t.gauges) gauges.push_back(number_to_json(v));
  return json{{"iterations", t.iterations},
              {"residual", number_to_json(t.residual)},
              {"converged", t.converged},
              {"eps0", number_to_json(t.eps0)},
              {"eps0_visited", number_to_json(t.eps0_visited)},
              {"tail_ratio", number_to_json(t.tail_ratio)},
              {"theoretical_factor", number_to_json(t.theoretical_factor)},
              {"provable_factor", number_to_json(t.provable_factor)},
              {"residuals", res},
              {"ratios", ratios},
              {"gauges", gauges}};
}

}  // namespace ncm::io
