#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "ncmetric/counterexample.hpp"
#include "ncmetric/domains.hpp"
#include "ncmetric/error.hpp"
#include "ncmetric/freeprob.hpp"
#include "ncmetric/json_io.hpp"
#include "ncmetric/metric.hpp"
#include "ncmetric/ncfunc.hpp"
#include "ncmetric/props.hpp"

namespace py = pybind11;
using namespace ncm;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const ComplexArray& arr) {
  if (arr.ndim() == 0) return CMatrix::scalar(*arr.data());
  if (arr.ndim() != 2) throw NcError(ErrorKind::InvalidSpec, "expected a 2-d array");
  const auto rows = static_cast<std::size_t>(arr.shape(0)), cols = static_cast<std::size_t>(arr.shape(1));
  return CMatrix(rows, cols, std::vector<cplx>(arr.data(), arr.data() + rows * cols));
}

ComplexArray to_array(const CMatrix& m) {
  ComplexArray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

std::size_t level_of(std::size_t n, std::size_t base_dim) {
  if (base_dim == 0 || n % base_dim != 0)
    throw NcError(ErrorKind::BaseDimMismatch, "size " + std::to_string(n) + " is not a multiple of base_dim");
  return n / base_dim;
}

NcPoint to_point(const ComplexArray& arr, std::size_t base_dim) {
  CMatrix m = to_matrix(arr);
  const std::size_t level = level_of(m.rows(), base_dim);
  return NcPoint(base_dim, level, std::move(m));
}

NcDirection to_direction(const ComplexArray& arr, std::size_t base_dim) {
  CMatrix m = to_matrix(arr);
  const std::size_t rl = level_of(m.rows(), base_dim), cl = level_of(m.cols(), base_dim);
  return NcDirection(base_dim, rl, cl, std::move(m));
}

io::json parse(const std::string& text) {
  try {
    return io::json::parse(text);
  } catch (const io::json::exception& e) {
    throw NcError(ErrorKind::InvalidSpec, std::string("malformed JSON: ") + e.what());
  }
}

DomainSpec domain_arg(const std::string& text) {
  if (text == "ball") return DomainSpec::ball();
  if (text == "halfplane") return DomainSpec::halfplane();
  return io::domain_from_json(parse(text));
}

py::object to_python(const io::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict delta_dict(const DeltaResult& r) { return to_python(io::delta_to_json(r)); }

PyObject* nc_error_type = nullptr;

}  // namespace

PYBIND11_MODULE(_ncmetric, m) {
  m.doc() = "Noncommutative hyperbolic metrics and operator-valued subordination";

  nc_error_type = PyErr_NewException("ncmetric._ncmetric.NcError", PyExc_RuntimeError, nullptr);
  m.attr("NcError") = py::handle(nc_error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NcError& e) {
      py::object exc = py::reinterpret_borrow<py::object>(nc_error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(nc_error_type, exc.ptr());
    }
  });

  m.def(
      "contains",
      [](const std::string& domain, const ComplexArray& a, std::size_t base_dim) {
        return contains(domain_arg(domain), to_point(a, base_dim));
      },
      py::arg("domain"), py::arg("a"), py::arg("base_dim") = 1);

  m.def(
      "delta",
      [](const std::string& domain, const ComplexArray& a, const ComplexArray& c, const ComplexArray& b,
         const std::string& method, std::size_t base_dim, double tol) {
        const DomainSpec d = domain_arg(domain);
        const NcPoint pa = to_point(a, base_dim), pc = to_point(c, base_dim);
        const NcDirection pb = to_direction(b, base_dim);
        if (method == "auto") return delta_dict(delta_auto(d, pa, pc, pb, tol));
        if (method == "ray") return delta_dict(delta_ray(d, pa, pc, pb, tol));
        if (method == "closed_ball") return delta_dict(delta_closed(ClosedKind::Ball, pa, pc, pb));
        if (method == "closed_halfplane") return delta_dict(delta_closed(ClosedKind::HalfPlane, pa, pc, pb));
        if (method == "kernel") {
          if (!d.kernel()) throw NcError(ErrorKind::InvalidSpec, "kernel method needs a kernel domain");
          return delta_dict(delta_kernel(*d.kernel(), pa, pc, pb));
        }
        throw NcError(ErrorKind::InvalidSpec, "unknown method '" + method + "'");
      },
      py::arg("domain"), py::arg("a"), py::arg("c"), py::arg("b"), py::arg("method") = "auto",
      py::arg("base_dim") = 1, py::arg("tol") = kRayDefaultTol);

  m.def(
      "delta_tilde",
      [](const std::string& domain, const ComplexArray& a, const ComplexArray& c, std::size_t base_dim) {
        return delta_dict(delta_tilde(domain_arg(domain), to_point(a, base_dim), to_point(c, base_dim)));
      },
      py::arg("domain"), py::arg("a"), py::arg("c"), py::arg("base_dim") = 1);

  m.def(
      "dtilde_upper",
      [](const std::string& domain, const ComplexArray& a, const ComplexArray& c, std::size_t base_dim,
         std::size_t refinements, std::size_t perturbation_budget, std::uint64_t seed) {
        DivisionOptions opts;
        opts.refinements = refinements;
        opts.perturbation_budget = perturbation_budget;
        opts.seed = seed;
        const DivisionBound r = dtilde_upper(domain_arg(domain), to_point(a, base_dim), to_point(c, base_dim), opts);
        py::dict out;
        out["value"] = r.value;
        out["level_values"] = r.level_values;
        out["running_min"] = r.running_min;
        out["after_perturbation"] = r.after_perturbation;
        out["evaluations"] = r.evaluations;
        out["diagnostic"] = r.diagnostic;
        return out;
      },
      py::arg("domain"), py::arg("a"), py::arg("c"), py::arg("base_dim") = 1, py::arg("refinements") = 8,
      py::arg("perturbation_budget") = 0, py::arg("seed") = 0);

  m.def(
      "d_upper",
      [](const std::string& domain, const ComplexArray& a, const ComplexArray& c, std::size_t base_dim,
         std::size_t quad_points) {
        const PathBound r = d_upper(domain_arg(domain),
                                    Path::straight(to_point(a, base_dim), to_point(c, base_dim)), quad_points);
        py::dict out;
        out["value"] = r.value;
        out["quadrature_error"] = r.quadrature_error;
        out["quad_points"] = r.quad_points;
        return out;
      },
      py::arg("domain"), py::arg("a"), py::arg("c"), py::arg("base_dim") = 1, py::arg("quad_points") = 256);

  m.def(
      "eval_function",
      [](const std::string& function, const ComplexArray& x) {
        return to_array(apply(io::function_from_json(parse(function)), to_matrix(x)));
      },
      py::arg("function"), py::arg("x"));

  m.def(
      "delta_f",
      [](const std::string& function, const ComplexArray& a, const ComplexArray& c, const ComplexArray& b,
         std::size_t base_dim) {
        return to_array(delta_f(io::function_from_json(parse(function)), to_point(a, base_dim),
                                to_point(c, base_dim), to_direction(b, base_dim))
                            .mat());
      },
      py::arg("function"), py::arg("a"), py::arg("c"), py::arg("b"), py::arg("base_dim") = 1);

  m.def(
      "cauchy_G",
      [](const std::string& model, const ComplexArray& b) {
        const OperatorValuedModel mdl = io::model_from_json(parse(model));
        return to_array(cauchy_G(mdl, to_point(b, mdl.base_dim())).mat());
      },
      py::arg("model"), py::arg("b"));

  m.def(
      "subordination",
      [](const std::string& model, const std::string& rho, const ComplexArray& b, double tol, std::size_t max_iter) {
        const OperatorValuedModel mdl = io::model_from_json(parse(model));
        SolveOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        const Subordination s = subordination_solve(mdl, io::cpmap_from_json(parse(rho)), to_point(b, mdl.base_dim()), opts);
        return py::make_tuple(to_array(s.omega.mat()), to_python(io::trace_to_json(s.trace)));
      },
      py::arg("model"), py::arg("rho"), py::arg("b"), py::arg("tol") = 1e-12, py::arg("max_iter") = 200);

  m.def(
      "convolved_G",
      [](const std::string& model, const std::string& rho, const ComplexArray& b) {
        const OperatorValuedModel mdl = io::model_from_json(parse(model));
        return to_array(convolved_G(mdl, io::cpmap_from_json(parse(rho)), to_point(b, mdl.base_dim())).mat());
      },
      py::arg("model"), py::arg("rho"), py::arg("b"));

  m.def(
      "density_grid",
      [](const std::string& model, const std::string& rho, double xmin, double xmax, double eps,
         std::size_t points) {
        const auto rows = density_grid(io::model_from_json(parse(model)), io::cpmap_from_json(parse(rho)), xmin,
                                       xmax, eps, points);
        std::vector<double> x, density, residual;
        std::vector<std::size_t> iterations;
        std::vector<bool> converged;
        for (const auto& r : rows) {
          x.push_back(r.x);
          density.push_back(r.density);
          residual.push_back(r.residual);
          iterations.push_back(r.iterations);
          converged.push_back(r.converged);
        }
        py::dict out;
        out["x"] = x;
        out["density"] = density;
        out["residual"] = residual;
        out["iterations"] = iterations;
        out["converged"] = converged;
        out["mass"] = total_mass(rows);
        return out;
      },
      py::arg("model"), py::arg("rho"), py::arg("xmin"), py::arg("xmax"), py::arg("eps") = 1e-3,
      py::arg("points") = 2001);

  m.def(
      "run_properties",
      [](std::uint64_t seed, const std::string& filter) {
        py::list out;
        for (const auto& r : run_properties(seed, filter)) {
          py::dict d;
          d["module"] = r.module;
          d["name"] = r.name;
          d["value"] = r.value;
          d["threshold"] = r.threshold;
          d["samples"] = r.samples;
          d["pass"] = r.pass;
          d["note"] = r.note;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 7, py::arg("filter") = "");

  m.def(
      "properties_report",
      [](std::uint64_t seed, const std::string& filter) { return format_report(run_properties(seed, filter)); },
      py::arg("seed") = 7, py::arg("filter") = "");

  m.def("matrix_convexity_counterexample", [] {
    const MatrixConvexityCase c = matrix_convexity_counterexample();
    py::dict out;
    out["level4"] = to_array(c.level4);
    out["level2"] = to_array(c.level2);
    out["isometry"] = to_array(c.isometry);
    out["level4_inside"] = c.level4_inside;
    out["level2_inside"] = c.level2_inside;
    out["compression_gap"] = c.compression_gap;
    return out;
  });

  m.def(
      "bounded_tilde_counterexample",
      [](std::uint64_t seed, std::size_t samples) {
        const BoundedTildeCase c = bounded_tilde_counterexample(seed, samples);
        py::dict out;
        out["samples"] = c.samples;
        out["max_tilde"] = c.max_tilde;
        out["bound"] = c.bound;
        out["ball_radius"] = c.ball_radius;
        out["ball_tilde"] = c.ball_tilde;
        return out;
      },
      py::arg("seed") = 7, py::arg("samples") = 200);
}
