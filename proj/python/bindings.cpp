#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcarpet/bohm.hpp"
#include "qcarpet/carpet.hpp"
#include "qcarpet/errors.hpp"
#include "qcarpet/fields.hpp"
#include "qcarpet/spectral.hpp"
#include "qcarpet/verify.hpp"

namespace py = pybind11;
using namespace qcarpet;

namespace {

std::vector<std::pair<int, std::complex<double>>> mode_list(const SpectralState& s) {
  std::vector<std::pair<int, std::complex<double>>> out;
  for (const Mode& m : s.modes()) out.emplace_back(m.alpha, m.c);
  return out;
}

SpectralState from_mode_list(const std::vector<std::pair<int, std::complex<double>>>& modes,
                             const WellConfig& config) {
  std::vector<Mode> ms;
  for (const auto& [a, c] : modes) ms.push_back({a, c});
  return SpectralState(std::move(ms), config);
}

py::dict path_dict(const Path& p) {
  py::dict d;
  d["x0"] = p.x0;
  d["t"] = py::array_t<double>(p.t.size(), p.t.data());
  d["x"] = py::array_t<double>(p.x.size(), p.x.data());
  d["ok"] = p.ok();
  d["failure_time"] = p.failure_time;
  d["message"] = p.message;
  d["accepted_steps"] = p.diagnostics.accepted_steps;
  d["rejected_steps"] = p.diagnostics.rejected_steps;
  d["near_node_rejections"] = p.diagnostics.near_node_rejections;
  d["wall_rejections"] = p.diagnostics.wall_rejections;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qcarpet, m) {
  m.doc() = "Quantum carpets in the infinite square well";

  py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_ArithmeticError);
  py::register_exception<FitError>(m, "FitError", PyExc_ArithmeticError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

  py::class_<WellConfig>(m, "WellConfig")
      .def(py::init([](double L, double w, double mass, double hbar) {
             WellConfig c{L, w, mass, hbar};
             c.validate();
             return c;
           }),
           py::arg("L") = 50.0, py::arg("w") = 10.0, py::arg("m") = 1.0, py::arg("hbar") = 1.0)
      .def_readwrite("L", &WellConfig::L)
      .def_readwrite("w", &WellConfig::w)
      .def_readwrite("m", &WellConfig::m)
      .def_readwrite("hbar", &WellConfig::hbar)
      .def("__eq__", [](const WellConfig& a, const WellConfig& b) { return a == b; })
      .def("__repr__", [](const WellConfig& c) {
        return "WellConfig(L=" + std::to_string(c.L) + ", w=" + std::to_string(c.w) +
               ", m=" + std::to_string(c.m) + ", hbar=" + std::to_string(c.hbar) + ")";
      });

  m.def("wavenumber", &wavenumber, py::arg("alpha"), py::arg("config") = WellConfig{});
  m.def("energy", &energy, py::arg("alpha"), py::arg("config") = WellConfig{});
  m.def("beat_frequency", &beat_frequency, py::arg("alpha"), py::arg("alpha_prime"),
        py::arg("config") = WellConfig{});
  m.def("recurrence_time", &recurrence_time, py::arg("config") = WellConfig{});
  m.def("eigenfunction", &eigenfunction, py::arg("alpha"), py::arg("x"),
        py::arg("config") = WellConfig{});

  py::class_<ApertureShape>(m, "ApertureShape")
      .def_static(
          "analytic",
          [](const std::string& name, double w, std::optional<double> sigma0) {
            return ApertureShape::analytic(parse_shape(name), w, sigma0);
          },
          py::arg("name"), py::arg("w") = 10.0, py::arg("sigma0") = std::nullopt)
      .def_static("sampled", &ApertureShape::sampled, py::arg("w"), py::arg("x"), py::arg("f"))
      .def_property_readonly("name", &ApertureShape::name)
      .def_property_readonly("width", &ApertureShape::width)
      .def("__call__", &ApertureShape::operator(), py::arg("x"));

  py::class_<SpectralState>(m, "SpectralState")
      .def(py::init(&from_mode_list), py::arg("modes"), py::arg("config") = WellConfig{})
      .def_static("single_mode", &SpectralState::single_mode, py::arg("alpha"),
                  py::arg("config") = WellConfig{}, py::arg("c") = std::complex<double>(1.0))
      .def_property_readonly("modes", &mode_list)
      .def_property_readonly("alphas",
                             [](const SpectralState& s) {
                               std::vector<int> a;
                               for (const Mode& md : s.modes()) a.push_back(md.alpha);
                               return a;
                             })
      .def_property_readonly("coefficients",
                             [](const SpectralState& s) {
                               py::array_t<std::complex<double>> out(s.size());
                               auto r = out.mutable_unchecked<1>();
                               for (std::size_t i = 0; i < s.size(); ++i) r(i) = s.modes()[i].c;
                               return out;
                             })
      .def_property_readonly("parity", [](const SpectralState& s) { return parity_name(s.parity()); })
      .def_property_readonly("config", &SpectralState::config)
      .def_property_readonly("norm_deficit", [](const SpectralState& s) { return s.info().norm_deficit; })
      .def("coefficient", &SpectralState::coefficient, py::arg("alpha"))
      .def("truncated", &SpectralState::truncated, py::arg("count"))
      .def("with_config", &SpectralState::with_config, py::arg("config"))
      .def("__len__", &SpectralState::size);

  m.def("coefficients_analytic", &coefficients_analytic, py::arg("shape"), py::arg("n_modes"),
        py::arg("config") = WellConfig{});
  m.def(
      "coefficients_quadrature",
      [](const std::function<std::complex<double>(double)>& f, int n, const WellConfig& cfg,
         std::vector<double> breakpoints) {
        return coefficients_quadrature(f, n, cfg, breakpoints);
      },
      py::arg("f"), py::arg("n_modes"), py::arg("config") = WellConfig{},
      py::arg("breakpoints") = std::vector<double>{});
  m.def(
      "coefficients_quadrature_shape",
      [](const ApertureShape& s, int n, const WellConfig& cfg) {
        return coefficients_quadrature(s, n, cfg);
      },
      py::arg("shape"), py::arg("n_modes"), py::arg("config") = WellConfig{});
  m.def("overlap_probability", py::overload_cast<const SpectralState&>(&overlap_probability));
  m.def("expected_energy", py::overload_cast<const SpectralState&>(&expected_energy));
  m.def("spread_count", &spread_count, py::arg("state"), py::arg("threshold_percent") = 25.0);
  m.def(
      "decay_exponent",
      [](const SpectralState& s, int lo, int hi) { return decay_exponent(s, lo, hi).slope; },
      py::arg("state"), py::arg("n_lo") = 10, py::arg("n_hi") = 100);

  py::class_<FieldEvaluator>(m, "FieldEvaluator")
      .def(py::init<SpectralState, std::optional<double>>(), py::arg("state"),
           py::arg("density_scale") = std::nullopt)
      .def("psi", &FieldEvaluator::psi, py::arg("x"), py::arg("t"))
      .def("rho", &FieldEvaluator::rho, py::arg("x"), py::arg("t"))
      .def("current", &FieldEvaluator::current, py::arg("x"), py::arg("t"))
      .def(
          "velocity",
          [](const FieldEvaluator& f, double x, double t) {
            const auto v = f.velocity(x, t);
            return py::make_tuple(v.value, v.near_node);
          },
          py::arg("x"), py::arg("t"))
      .def(
          "quantum_potential",
          [](const FieldEvaluator& f, double x, double t) {
            const auto q = f.quantum_potential(x, t);
            return py::make_tuple(q.value, q.near_node);
          },
          py::arg("x"), py::arg("t"));

  m.def(
      "render_grid",
      [](const SpectralState& s, const std::string& kind, std::size_t nx, std::size_t nt, double T,
         unsigned jobs) {
        FieldGrid g;
        {
          py::gil_scoped_release release;
          g = render_grid(s, parse_field_kind(kind), nx, nt, T, jobs);
        }
        py::array_t<double> values({g.nt, g.nx});
        std::copy(g.values.begin(), g.values.end(), values.mutable_data());
        py::dict d;
        d["values"] = values;
        d["x"] = py::array_t<double>(g.x_axis.size(), g.x_axis.data());
        d["t"] = py::array_t<double>(g.t_axis.size(), g.t_axis.data());
        d["clip"] = py::make_tuple(g.clip_lo, g.clip_hi);
        py::array_t<bool> flags({g.nt, g.nx});
        std::copy(g.near_node.begin(), g.near_node.end(), flags.mutable_data());
        d["near_node"] = flags;
        return d;
      },
      py::arg("state"), py::arg("kind") = "density", py::arg("nx") = 1001, py::arg("nt") = 1001,
      py::arg("T"), py::arg("jobs") = 0);
  m.def("autocorrelation", &autocorrelation, py::arg("state"), py::arg("t"));
  m.def("revival_fidelity", py::overload_cast<const SpectralState&>(&revival_fidelity));
  m.def(
      "symmetry_report",
      [](const SpectralState& s, std::size_t nx, std::size_t nt, unsigned jobs) {
        SymmetryReport r;
        {
          py::gil_scoped_release release;
          r = symmetry_report(s, nx, nt, jobs);
        }
        py::dict d;
        d["mirror_error"] = r.mirror_error;
        d["time_reversal_error"] = r.time_reversal_error;
        d["revival_fidelity"] = r.revival_fidelity;
        d["half_time_split_error"] =
            r.half_time_split_checked ? py::object(py::float_(r.half_time_split_error)) : py::none();
        d["max_rho"] = r.max_rho;
        return d;
      },
      py::arg("state"), py::arg("nx") = 501, py::arg("nt") = 501, py::arg("jobs") = 0);
  m.def(
      "fractional_revival_check",
      [](const SpectralState& s, std::size_t nx) {
        const auto fr = fractional_revival_check(s, nx);
        return fr.checked ? py::object(py::float_(fr.relative())) : py::none();
      },
      py::arg("state"), py::arg("nx") = 1001);

  m.def("seed_uniform", py::overload_cast<int, double>(&seed_uniform), py::arg("n"), py::arg("a"));
  m.def("seed_density_weighted",
        py::overload_cast<const SpectralState&, int>(&seed_density_weighted), py::arg("state"),
        py::arg("n"));
  m.def(
      "integrate_trajectory",
      [](const SpectralState& s, double x0, double t1, std::size_t samples, double rtol) {
        auto spec = TrajectorySpec::with_defaults(s.config(), x0, t1, samples);
        spec.rtol = rtol;
        Path p;
        {
          py::gil_scoped_release release;
          p = integrate_trajectory(s, spec);
        }
        return path_dict(p);
      },
      py::arg("state"), py::arg("x0"), py::arg("t1"), py::arg("samples") = 401,
      py::arg("rtol") = 1e-8);
  m.def(
      "integrate_ensemble",
      [](const SpectralState& s, const std::vector<double>& seeds, double t1, std::size_t samples,
         unsigned jobs) {
        std::vector<TrajectorySpec> specs;
        for (double x0 : seeds) specs.push_back(TrajectorySpec::with_defaults(s.config(), x0, t1, samples));
        TrajectoryEnsemble ens;
        {
          py::gil_scoped_release release;
          ens = integrate_ensemble(s, std::move(specs), jobs);
        }
        py::list paths;
        for (const Path& p : ens.paths) paths.append(path_dict(p));
        py::dict d;
        d["paths"] = paths;
        d["crossing_violations"] = ens.crossing_violations;
        d["failures"] = ens.failures();
        return d;
      },
      py::arg("state"), py::arg("seeds"), py::arg("t1"), py::arg("samples") = 401,
      py::arg("jobs") = 0);

  m.def(
      "run_acceptance",
      [](std::vector<int> only) {
        VerifyOptions o;
        o.only = std::move(only);
        std::vector<CheckResult> checks;
        {
          py::gil_scoped_release release;
          checks = run_acceptance(o);
        }
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks) arr.push_back(to_json(c));
        return arr.dump();
      },
      py::arg("only") = std::vector<int>{});
}
