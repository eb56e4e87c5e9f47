#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "muskat/evolution.hpp"
#include "muskat/harness.hpp"
#include "muskat/paradiff.hpp"

namespace py = pybind11;
using namespace muskat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SpectralFunction to_function(const Array& a, double period) {
  if (a.ndim() != 1) throw InputError("expected a one-dimensional array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  return SpectralFunction::from_values(TorusGrid(n, period), std::vector<double>(a.data(), a.data() + n));
}

Array to_array(const SpectralFunction& u) {
  Array out(static_cast<py::ssize_t>(u.size()));
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

DomainGeometry geometry(std::optional<double> depth, std::optional<double> top_depth, double h) {
  DomainGeometry g;
  if (depth) g.bottom = Boundary::flat(*depth);
  if (top_depth) g.top = Boundary::flat(*top_depth);
  g.h = h;
  return g;
}

py::dict dn(const Array& eta, const Array& f, std::optional<double> depth, std::size_t z_intervals, double tol,
            const std::string& side, double period) {
  DNSettings s;
  s.z_intervals = z_intervals;
  s.tol = tol;
  Side sd;
  if (side == "lower") sd = Side::Lower;
  else if (side == "upper") sd = Side::Upper;
  else throw InputError("side must be 'lower' or 'upper'");
  const auto geom = sd == Side::Lower ? geometry(depth, std::nullopt, 0.1) : geometry(std::nullopt, depth, 0.1);
  const auto e = to_function(eta, period), ff = to_function(f, period);
  const auto o = [&] {
    py::gil_scoped_release release;
    return dn_apply(e, ff, geom, sd, s);
  }();
  py::dict d;
  d["g"] = to_array(o.g);
  d["g_trace"] = to_array(o.g_trace);
  d["B"] = to_array(o.b_field);
  d["V"] = to_array(o.v_field);
  d["residual"] = o.residual;
  d["iterations"] = o.iterations;
  return d;
}

py::dict potentials(const Array& eta, double mu_plus, double mu_minus, double rho_plus, double rho_minus,
                    std::size_t z_intervals, double period) {
  TwoPhaseConfig cfg;
  cfg.mu_plus = mu_plus;
  cfg.mu_minus = mu_minus;
  cfg.rho_plus = rho_plus;
  cfg.rho_minus = rho_minus;
  TwoPhaseSettings s;
  s.dn.z_intervals = z_intervals;
  const auto e = to_function(eta, period);
  auto sol = [&] {
    py::gil_scoped_release release;
    return solve_interface_potentials(e, cfg, s);
  }();
  py::dict d;
  d["f_minus"] = to_array(sol.f_minus);
  d["f_plus"] = to_array(sol.f_plus);
  d["rt_via_B"] = to_array(sol.rt_via_B);
  d["rt_via_darcy"] = to_array(sol.rt_via_darcy);
  d["flux_residual"] = sol.flux_residual;
  d["iterations"] = sol.certificate.iterations;
  return d;
}

Array step(const Array& eta, double dt, double kappa, std::optional<double> depth, std::size_t z_intervals,
           double epsilon, double period) {
  EvolutionConfig c;
  c.dt = dt;
  c.kappa = kappa;
  c.epsilon = epsilon;
  c.validate();
  DNSettings dn;
  dn.z_intervals = z_intervals;
  const auto e = to_function(eta, period);
  const auto geom = geometry(depth, std::nullopt, 0.1);
  const auto r = [&] {
    py::gil_scoped_release release;
    return step_one_phase(e, geom, c, dn);
  }();
  return to_array(r.eta);
}

py::dict run(const std::string& path, std::optional<std::string> out, int threads, std::optional<std::uint64_t> seed) {
  auto cfg = parse_config(path);
  if (out) cfg.output = *out;
  if (seed) cfg.seed = *seed;
  cfg.validate();
  const auto r = [&] {
    py::gil_scoped_release release;
    return run_preset(cfg, threads);
  }();
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["out_dir"] = r.out_dir.string();
  d["files"] = r.files;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_muskat, m) {
  m.doc() = "Muskat interface laboratory";
  m.attr("__version__") = MUSKAT_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<MapValidityError>(m, "MapValidityError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("flat_dn_multiplier", &flat_dn_multiplier, py::arg("k"), py::arg("depth") = py::none(),
        "|k| tanh(H|k|), or |k| for infinite depth.");
  m.def("dn_apply", &dn, py::arg("eta"), py::arg("f"), py::arg("depth") = py::none(), py::arg("z_intervals") = 64,
        py::arg("tol") = 1e-10, py::arg("side") = "lower", py::arg("period") = kTwoPi,
        "G(eta) f on a uniform periodic grid. Returns g, g_trace, B, V, residual, iterations.");
  m.def("solve_interface_potentials", &potentials, py::arg("eta"), py::arg("mu_plus") = 1.0,
        py::arg("mu_minus") = 1.0, py::arg("rho_plus") = 0.0, py::arg("rho_minus") = 1.0,
        py::arg("z_intervals") = 64, py::arg("period") = kTwoPi);
  m.def("step_one_phase", &step, py::arg("eta"), py::arg("dt"), py::arg("kappa") = 1.0,
        py::arg("depth") = py::none(), py::arg("z_intervals") = 32, py::arg("epsilon") = 0.0,
        py::arg("period") = kTwoPi, "One semi-implicit step.");
  m.def(
      "paralinearization_residual",
      [](const Array& eta, const Array& f, std::size_t z_intervals, double period) {
        DNSettings s;
        s.z_intervals = z_intervals;
        const auto e = to_function(eta, period), ff = to_function(f, period);
        const auto p = [&] {
          py::gil_scoped_release release;
          return paralinearize_dn(e, ff, DomainGeometry{}, s);
        }();
        return to_array(p.residual);
      },
      py::arg("eta"), py::arg("f"), py::arg("z_intervals") = 64, py::arg("period") = kTwoPi);
  m.def(
      "parse_config",
      [](const std::string& text) { return serialize_config(parse_config_text(text)); }, py::arg("text"),
      "Validate a YAML configuration and return it with every default filled in.");
  m.def("run", &run, py::arg("config"), py::arg("out") = py::none(), py::arg("threads") = 1,
        py::arg("seed") = py::none());
  m.def(
      "check",
      [](int threads) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& c : run_invariant_checks(threads)) out.emplace_back(c.name, c.passed, c.detail);
        return out;
      },
      py::arg("threads") = 1);
  m.def(
      "oracle",
      [](const std::string& name) {
        auto r = oracle_report(name, preset_defaults(Preset::Freeplay));
        if (r.empty()) throw InputError("unknown oracle '" + name + "'");
        return r;
      },
      py::arg("name"));
  m.def("oracle_names", &oracle_names);
  m.def("sha256_hex", &sha256_hex);
}
