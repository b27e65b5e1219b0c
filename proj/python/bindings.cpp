#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "bcnls/checks.hpp"
#include "bcnls/io.hpp"

namespace py = pybind11;
using namespace bcnls;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ValidatedParams params_of(int dimension, double exponent, const std::vector<double>& mu, std::optional<double> beta,
                          bool allow_out_of_range, bool allow_decoupled) {
  const double b = beta.value_or(mu.size() > 1 ? 0.0 : 1.0);
  return make_params(dimension, exponent, {mu, b},
                     {.allow_out_of_range = allow_out_of_range, .allow_decoupled = allow_decoupled});
}

py::array_t<double> radial_array(const RadialField& f) {
  py::array_t<double> a({f.components(), f.size()});
  std::copy(f.values().begin(), f.values().end(), a.mutable_data());
  return a;
}

py::array_t<std::complex<double>> box_array(const ComplexField& u) {
  std::vector<py::ssize_t> shape{u.components()};
  for (int d = 0; d < u.grid().dims(); ++d) shape.push_back(u.grid().points_per_dim());
  py::array_t<std::complex<double>> a(shape);
  std::copy(u.values().begin(), u.values().end(), a.mutable_data());
  return a;
}

py::array_t<double> nodes_array(const RadialGrid& g) {
  py::array_t<double> a(g.size());
  std::copy(g.nodes().begin(), g.nodes().end(), a.mutable_data());
  return a;
}

// RAII release of the GIL around long solves.
template <class F>
auto nogil(F&& f) {
  py::gil_scoped_release release;
  return f();
}

}  // namespace

PYBIND11_MODULE(_bcnls, m) {
  m.doc() = "Ground states, GN constants and split-step dynamics for biharmonic coupled NLS systems";
  m.attr("__version__") = BCNLS_VERSION;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("critical_exponents", [](int n) {
    const auto c = critical_exponents(n);
    return py::make_tuple(c.lower, c.upper);
  });

  m.def(
      "params_from_json",
      [](const std::string& text) { return to_py(params_to_json(params_from_json(Json::parse(text)))); },
      py::arg("text"), "Validate a JSON configuration and return its normalized form.");

  m.def(
      "groundstate",
      [](int dimension, double exponent, std::vector<double> mu, std::optional<double> beta, double radius,
         int points, bool allow_out_of_range) {
        const auto p = params_of(dimension, exponent, mu, beta, allow_out_of_range, false);
        auto g = RadialGrid::make(dimension, radius, points);
        const auto gs = nogil([&] {
          return p.components() == 1 && p.a(0, 0) == 1.0
                     ? solve_scalar_w(g, dimension, exponent, {}, p.options())
                     : solve_vector_direct(g, p);
        });
        py::dict d = to_py(to_json(gs));
        d["profile"] = radial_array(gs.profile);
        d["nodes"] = nodes_array(*g);
        return d;
      },
      py::arg("dimension"), py::arg("exponent"), py::arg("mu") = std::vector<double>{1.0},
      py::arg("beta") = py::none(), py::arg("radius") = 20.0, py::arg("points") = 4000,
      py::arg("allow_out_of_range") = false);

  m.def(
      "solve_amplitudes",
      [](std::vector<double> mu, double beta, double exponent) {
        const auto a = solve_amplitudes({mu, beta}, exponent);
        py::dict d;
        d["c"] = a.c;
        d["residual"] = a.residual;
        d["hypothesis_satisfied"] = a.hypothesis_satisfied;
        return d;
      },
      py::arg("mu"), py::arg("beta"), py::arg("exponent"));

  m.def(
      "classify_beta",
      [](int dimension, double exponent, std::vector<double> mu, std::vector<double> betas, double radius, int points) {
        auto g = RadialGrid::make(dimension, radius, points);
        return to_py(to_json(nogil([&] { return classify_beta(g, dimension, exponent, mu, betas); })));
      },
      py::arg("dimension"), py::arg("exponent"), py::arg("mu"), py::arg("betas"), py::arg("radius") = 20.0,
      py::arg("points") = 2000);

  m.def(
      "gn",
      [](int dimension, double exponent, std::vector<double> mu, std::optional<double> beta, double radius, int points,
         bool validate, int probes, std::uint64_t seed, bool allow_out_of_range) {
        const bool decoupled = beta && *beta == 0.0;
        const auto p = params_of(dimension, exponent, mu, beta, allow_out_of_range, decoupled);
        auto g = RadialGrid::make(dimension, radius, points);
        const auto gn = nogil([&] { return minimize_J(g, p); });
        py::dict d;
        d["gn"] = to_py(to_json(gn));
        d["minimizer"] = radial_array(gn.minimizer);
        d["minimizer_nodes"] = nodes_array(gn.minimizer.grid());
        if (validate) {
          const auto w = solve_scalar_w(g, dimension, exponent, {}, p.options());
          d["cross_validation"] = to_py(to_json(cross_validate(gn, w.profile, {mu, beta.value_or(0.0)}, p)));
        }
        if (probes > 0) {
          d["inequality"] =
              to_py(to_json(check_gn_inequality(gn.C_best, probe_corpus(g, p.components(), probes, seed), p, &gn.minimizer)));
        }
        return d;
      },
      py::arg("dimension"), py::arg("exponent"), py::arg("mu") = std::vector<double>{1.0},
      py::arg("beta") = py::none(), py::arg("radius") = 20.0, py::arg("points") = 4000, py::arg("validate") = false,
      py::arg("probes") = 0, py::arg("seed") = 2024, py::arg("allow_out_of_range") = false);

  m.def(
      "evolve",
      [](int dimension, double exponent, std::vector<double> mu, std::optional<double> beta, double box, int points,
         double dt, double T, double amplitude, double sigma, std::vector<std::pair<double, double>> pairs,
         std::optional<double> m_level, std::optional<double> gn_constant, long sample_every, const std::string& scheme,
         bool allow_out_of_range) {
        const auto p = params_of(dimension, exponent, mu, beta, allow_out_of_range, false);
        auto grid = PeriodicGrid::make(dimension, points, box);
        MonitorConfig mc;
        mc.sample_every = sample_every;
        for (auto [a, b] : pairs) mc.pairs.push_back(checked_pair(a, b));
        mc.m_level = m_level;
        mc.gn_constant = gn_constant;
        if (scheme != "strang" && scheme != "yoshida4") {
          throw ValidationError(ValidationKind::options, "scheme must be strang or yoshida4");
        }
        const auto tr = nogil([&] {
          return evolve(gaussian_data(grid, p.components(), amplitude, sigma), T, dt, p, mc,
                        scheme == "strang" ? Splitting::strang : Splitting::yoshida4);
        });
        py::dict d = to_py(to_json(tr));
        d["times"] = tr.times;
        d["mass"] = tr.mass_series;
        d["energy"] = tr.energy_series;
        d["kinetic"] = tr.kinetic_series;
        d["action"] = tr.action_series;
        d["K"] = tr.K_series;
        d["final_field"] = box_array(tr.final_state.field);
        return d;
      },
      py::arg("dimension"), py::arg("exponent"), py::arg("mu") = std::vector<double>{1.0},
      py::arg("beta") = py::none(), py::arg("box") = 8.0, py::arg("points") = 24, py::arg("dt") = 1e-3,
      py::arg("T") = 1.0, py::arg("amplitude") = 1.0, py::arg("sigma") = 1.0,
      py::arg("pairs") = std::vector<std::pair<double, double>>{}, py::arg("m_level") = py::none(),
      py::arg("gn_constant") = py::none(), py::arg("sample_every") = 1, py::arg("scheme") = "strang",
      py::arg("allow_out_of_range") = false);

  m.def(
      "write_radial_snapshot",
      [](const std::string& path, py::array_t<double, py::array::c_style | py::array::forcecast> values,
         int dimension, double radius, double time) {
        if (values.ndim() != 2) throw ValidationError(ValidationKind::options, "values must have shape (m, n)");
        auto g = RadialGrid::make(dimension, radius, static_cast<int>(values.shape(1)));
        std::vector<double> v(values.data(), values.data() + values.size());
        write_snapshot(path, RadialField(g, static_cast<int>(values.shape(0)), std::move(v)), time);
      },
      py::arg("path"), py::arg("values"), py::arg("dimension"), py::arg("radius"), py::arg("time") = 0.0);

  m.def(
      "read_snapshot",
      [](const std::string& path) {
        const auto snap = read_snapshot(path);
        py::dict d;
        d["time"] = snap.time;
        if (const auto* f = std::get_if<RadialField>(&snap.field)) {
          d["kind"] = "radial";
          d["dimension"] = f->grid().dimension();
          d["radius"] = f->grid().radius();
          d["values"] = radial_array(*f);
        } else {
          const auto& u = std::get<ComplexField>(snap.field);
          d["kind"] = "periodic";
          d["dimension"] = u.grid().dims();
          d["half_period"] = u.grid().half_period();
          d["values"] = box_array(u);
        }
        return d;
      },
      py::arg("path"));

  m.def("preset_names", &preset_names);
  m.def(
      "run_preset", [](const std::string& name) { return to_py(to_json(nogil([&] { return run_preset(name); }))); },
      py::arg("name"));
  m.def(
      "invariant_suite",
      [](int dimension, double exponent) {
        const auto results = nogil([&] { return invariant_suite(dimension, exponent); });
        py::list out;
        for (const auto& r : results) out.append(to_py(to_json(r)));
        return out;
      },
      py::arg("dimension"), py::arg("exponent"));
}
