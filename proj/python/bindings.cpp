#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thermolab/backward.hpp"
#include "thermolab/cli.hpp"
#include "thermolab/complexdyn.hpp"
#include "thermolab/config.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/ldp.hpp"
#include "thermolab/numerics.hpp"
#include "thermolab/periodic.hpp"
#include "thermolab/pressure.hpp"

namespace py = pybind11;
using namespace thermo;

namespace {

py::dict to_dict(const PressureEstimate& e) {
  py::list iterates;
  for (const auto& it : e.iterates) iterates.append(py::make_tuple(it.index, it.value));
  py::dict d;
  d["method"] = to_string(e.method);
  d["iterates"] = iterates;
  d["extrapolated"] = e.extrapolated;
  d["uncertainty"] = e.uncertainty;
  d["model"] = e.model;
  return d;
}

Schedule make_schedule(int n_max, int periodic_n_max, std::vector<int> m) {
  Schedule s;
  if (n_max > 0) s.preimage_n_max = n_max;
  if (periodic_n_max > 0) s.periodic_n_max = periodic_n_max;
  if (!m.empty()) s.spectral_m = std::move(m);
  return s;
}

// Accepts a Potential or a descriptor string such as "branch:0.2,-0.3".
Potential as_potential(const PiecewiseMap& map, const py::object& p) {
  if (py::isinstance<py::str>(p)) return parse_potential(map, p.cast<std::string>());
  return p.cast<Potential>();
}

}  // namespace

PYBIND11_MODULE(_thermolab, m) {
  m.doc() = "Pressure, transfer operators and large deviations for 1-D maps";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def("set_threads", &set_thread_count, py::arg("threads"));
  m.def("threads", &thread_count);

  py::class_<PiecewiseMap>(m, "Map")
      .def_property_readonly("name", &PiecewiseMap::name)
      .def_property_readonly("domain", [](const PiecewiseMap& f) { return py::make_tuple(f.domain().lo, f.domain().hi); })
      .def_property_readonly("branch_count", &PiecewiseMap::branch_count)
      .def_property_readonly("is_circle", &PiecewiseMap::is_circle)
      .def("__call__", &PiecewiseMap::apply, py::arg("x"))
      .def("iterate", [](const PiecewiseMap& f, double x, int steps) { return evaluate(f, x, steps); }, py::arg("x"),
           py::arg("steps"))
      .def("branch_of", &PiecewiseMap::branch_of, py::arg("x"))
      .def("itinerary", [](const PiecewiseMap& f, double x, int n) {
        const auto w = itinerary(f, x, n);
        return std::vector<int>(w.begin(), w.end());
      }, py::arg("x"), py::arg("n"))
      .def("__repr__", [](const PiecewiseMap& f) { return "<Map " + f.name() + ">"; });

  m.def("load_map", &load_map, py::arg("descriptor"),
        "Builtin name, 'logistic:r', inline JSON, or a path to a JSON file.");
  m.def("map_to_json", &map_to_json, py::arg("map"));

  py::class_<Potential>(m, "Potential")
      .def_static("constant", &Potential::constant, py::arg("c"))
      .def_static("affine", &Potential::affine, py::arg("slope"), py::arg("intercept") = 0.0)
      .def_static("branch_constant", &Potential::branch_constant, py::arg("map"), py::arg("values"))
      .def_static("cosine", &Potential::cosine, py::arg("amplitude"), py::arg("frequency") = 1.0)
      .def_static("parse", &parse_potential, py::arg("map"), py::arg("descriptor"))
      .def_property_readonly("name", &Potential::name)
      .def("__call__", &Potential::operator(), py::arg("x"))
      .def("__repr__", [](const Potential& p) { return "<Potential " + p.name() + ">"; });

  m.def(
      "estimate",
      [](const PiecewiseMap& f, const py::object& phi, const std::string& method, int n_max, int periodic_n_max,
         std::vector<int> sizes) {
        return to_dict(estimate(f, as_potential(f, phi), method_from_string(method),
                                make_schedule(n_max, periodic_n_max, std::move(sizes))));
      },
      py::arg("map"), py::arg("potential"), py::arg("method") = "spectral", py::arg("n_max") = 0,
      py::arg("periodic_n_max") = 0, py::arg("m") = std::vector<int>{});

  m.def(
      "cross_validate",
      [](const PiecewiseMap& f, const py::object& phi, double tolerance, int n_max, int periodic_n_max,
         std::vector<int> sizes) {
        const auto r = cross_validate(f, as_potential(f, phi), make_schedule(n_max, periodic_n_max, std::move(sizes)),
                                      tolerance);
        py::list ests;
        for (const auto& e : r.estimates) ests.append(to_dict(e));
        py::dict d;
        d["consensus"] = r.consensus;
        d["max_difference"] = r.max_difference;
        d["tolerance"] = r.tolerance;
        d["verdict"] = r.verdict;
        d["estimates"] = ests;
        d["lower_bound"] = r.lower_bound ? py::object(to_dict(*r.lower_bound)) : py::none();
        return d;
      },
      py::arg("map"), py::arg("potential"), py::arg("tolerance") = 1e-3, py::arg("n_max") = 0,
      py::arg("periodic_n_max") = 0, py::arg("m") = std::vector<int>{});

  m.def(
      "periodic_points",
      [](const PiecewiseMap& f, int n, const py::object& phi) {
        const auto pts = phi.is_none() ? periodic_points(f, n) : periodic_points(f, as_potential(f, phi), n);
        std::vector<double> x, w;
        for (const auto& p : pts) {
          x.push_back(p.point);
          w.push_back(p.log_weight);
        }
        return py::make_tuple(x, w);
      },
      py::arg("map"), py::arg("n"), py::arg("potential") = py::none(),
      "Fixed points of f^n and their Birkhoff sums S_n(phi).");

  m.def(
      "preimage_log_partition",
      [](const PiecewiseMap& f, const py::object& phi, double x0, int n) {
        return log_partition_preimage(backward_orbit(f, as_potential(f, phi), x0, n));
      },
      py::arg("map"), py::arg("potential"), py::arg("x0"), py::arg("n"));

  m.def(
      "scgf",
      [](const PiecewiseMap& f, const py::object& phi, const py::object& psi, std::vector<double> t,
         const std::string& method, int mc_n, std::size_t trials, std::uint64_t seed) {
        ScgfOptions o;
        o.mc_n = mc_n;
        o.trials = trials;
        o.seed = seed;
        const auto kind = method == "monte-carlo" ? ScgfMethod::MonteCarlo : ScgfMethod::PressureDifference;
        if (method != "monte-carlo" && method != "pressure") {
          throw ValidationError("scgf: method must be 'pressure' or 'monte-carlo'");
        }
        const auto c = scgf(f, as_potential(f, phi), as_potential(f, psi), t, kind, o);
        return py::make_tuple(c.t, c.lambda);
      },
      py::arg("map"), py::arg("potential"), py::arg("observable"), py::arg("t"), py::arg("method") = "pressure",
      py::arg("mc_n") = 30, py::arg("trials") = 10000, py::arg("seed") = 1);

  m.def(
      "legendre_rate",
      [](std::vector<double> t, std::vector<double> lambda, std::vector<double> s) {
        SCGFCurve c;
        c.t = std::move(t);
        c.lambda = std::move(lambda);
        if (c.t.size() != c.lambda.size()) throw ValidationError("legendre_rate: t and lambda differ in length");
        return legendre_rate(c, s).rate;
      },
      py::arg("t"), py::arg("scgf"), py::arg("s"));

  m.def(
      "complex_pressure",
      [](Complex c, const std::string& potential, const std::string& method, int n_max, std::optional<Complex> z0) {
        const ComplexQuadratic q{c};
        const auto phi = parse_complex_potential(potential);
        if (method == "preimage") {
          return to_dict(complex_preimage_pressure(q, phi, z0.value_or(q.beta_fixed_point()), 1, n_max > 0 ? n_max : 16));
        }
        if (method == "periodic") return to_dict(complex_periodic_pressure(q, phi, 1, n_max > 0 ? n_max : 10));
        throw ValidationError("complex_pressure: method must be 'preimage' or 'periodic'");
      },
      py::arg("c"), py::arg("potential") = "const:0", py::arg("method") = "preimage", py::arg("n_max") = 0,
      py::arg("z0") = py::none());

  m.def(
      "julia_sample",
      [](Complex c, std::size_t count, std::uint64_t seed) { return julia_sample(ComplexQuadratic{c}, count, seed).points; },
      py::arg("c"), py::arg("count"), py::arg("seed") = 1);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("command", &RunConfig::command)
      .def_readwrite("map", &RunConfig::map)
      .def_readwrite("potential", &RunConfig::potential)
      .def_readwrite("observable", &RunConfig::observable)
      .def_readwrite("method", &RunConfig::method)
      .def_readwrite("source", &RunConfig::source)
      .def_readwrite("n_min", &RunConfig::n_min)
      .def_readwrite("n_max", &RunConfig::n_max)
      .def_readwrite("periodic_n_max", &RunConfig::periodic_n_max)
      .def_readwrite("m", &RunConfig::m)
      .def_readwrite("tolerance", &RunConfig::tolerance)
      .def_readwrite("x0", &RunConfig::x0)
      .def_readwrite("t_min", &RunConfig::t_min)
      .def_readwrite("t_max", &RunConfig::t_max)
      .def_readwrite("t_count", &RunConfig::t_count)
      .def_readwrite("s0", &RunConfig::s0)
      .def_readwrite("mc_n", &RunConfig::mc_n)
      .def_readwrite("trials", &RunConfig::trials)
      .def_readwrite("weakstar_n", &RunConfig::weakstar_n)
      .def_readwrite("c", &RunConfig::c)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("threads", &RunConfig::threads)
      .def_readwrite("format", &RunConfig::format);

  m.def(
      "run",
      [](const RunConfig& config, bool include_wall_time) {
        const auto r = execute(config, include_wall_time);
        return py::make_tuple(r.exit_code, r.report, r.error);
      },
      py::arg("config"), py::arg("include_wall_time") = false,
      "Runs one command-line subcommand; returns (exit_code, report, error).");

  m.attr("__version__") = THERMOLAB_VERSION;
}
