#include "bcnls/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>

namespace bcnls {

namespace {

std::string strf(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double sup_diff(const RadialField& a, const RadialField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

/// Least-squares slope of log y against log x.
double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Json pair_json(ScalingPair p) { return Json::array({p.alpha, p.beta}); }

std::string pair_str(ScalingPair p) { return strf("(%g,%g)", p.alpha, p.beta); }

// ---------------------------------------------------------------------------------------------
// Criteria

CheckResult pohozaev_ratios() {
  CheckResult r;
  r.title = "Pohozaev ratios of w";
  r.pass = true;
  double worst = 0.0;
  r.details["cases"] = Json::array();
  for (auto [n, p] : {std::pair{4, 3.0}, std::pair{5, 2.0}, std::pair{6, 2.0}}) {
    const auto w = solve_scalar_w(RadialGrid::make(n, 20.0, 4000), n, p);
    const double err = std::max(std::abs(w.pohozaev.residual_kinetic), std::abs(w.pohozaev.residual_potential));
    worst = std::max(worst, err);
    r.pass = r.pass && w.pohozaev.defined && err <= 1e-4;
    r.details["cases"].push_back({{"dimension", n},
                                  {"exponent", p},
                                  {"ratio_kinetic", w.pohozaev.ratio_kinetic},
                                  {"expected_kinetic", w.pohozaev.expected_kinetic},
                                  {"ratio_potential", w.pohozaev.ratio_potential},
                                  {"expected_potential", w.pohozaev.expected_potential},
                                  {"relative_error", err}});
  }
  r.summary = strf("(4,3) (5,2) (6,2) at R=20 n=4000: worst relative error %.2e (tol 1e-4)", worst);
  return r;
}

CheckResult constraint_vanishing() {
  CheckResult r;
  r.title = "K vanishes on converged solutions";
  auto g = RadialGrid::make(5, 20.0, 8000);
  struct Case {
    std::string label;
    GroundStateResult gs;
  };
  std::vector<Case> cases;
  cases.push_back({"w (5,2)", solve_scalar_w(g, 5, 2.0)});
  cases.push_back({"vector mu=(1,2) beta=0.5", solve_vector_direct(g, make_params(5, 2.0, {{1.0, 2.0}, 0.5}))});
  PetviashviliOptions opts;
  opts.perturbation = {0.0, 0.5};
  cases.push_back({"vector mu=(1,1) beta=10", solve_vector_direct(g, make_params(5, 2.0, {{1.0, 1.0}, 10.0}), opts)});
  double worst = 0.0;
  r.pass = true;
  r.details["cases"] = Json::array();
  for (const auto& c : cases) {
    Json k = Json::array();
    for (const auto& s : c.gs.constraint_values) {
      const double v = std::abs(s.K) / c.gs.action_level;
      worst = std::max(worst, v);
      r.pass = r.pass && v <= 1e-4;
      k.push_back({{"pair", pair_json(s.pair)}, {"K_over_S", s.K / c.gs.action_level}});
    }
    r.pass = r.pass && c.gs.constraint_values.size() >= 4;
    r.details["cases"].push_back({{"solution", c.label}, {"action", c.gs.action_level}, {"constraints", k}});
  }
  r.summary = strf("3 solutions x pairs (1,0) (0,1) (1,1) (2,3) at n=8000: max |K|/S %.2e (tol 1e-4)", worst);
  return r;
}

CheckResult lie_derivative() {
  CheckResult r;
  r.title = "K is the Lie derivative of S along the scaling flow";
  auto g = RadialGrid::make(5, 15.0, 2000);
  auto params = make_params(5, 2.0, {{1.0}, 0.0});
  const auto probes = probe_corpus(g, 1, 20, 2024);
  const auto& pairs = default_constraint_pairs();
  double worst = 1e300;
  r.details["probes"] = Json::array();
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto pair = pairs[k % pairs.size()];
    const auto rep = lie_derivative_check(probes[k], params, pair);
    worst = std::min(worst, rep.observed_order);
    r.details["probes"].push_back({{"pair", pair_json(pair)}, {"K", rep.K}, {"observed_order", rep.observed_order}});
  }
  r.pass = worst >= 1.9;
  r.summary = strf("20 seeded probes at (5,2), lambda 1e-2..2.5e-3: min fitted order %.3f (need >= 1.9)", worst);
  return r;
}

CheckResult amplitude_route() {
  CheckResult r;
  r.title = "Amplitude-reduced vector solution";
  auto g = RadialGrid::make(5, 20.0, 4000);
  const ReducedCoupling rc{{1.0, 2.0}, 0.5};
  auto params = make_params(5, 2.0, rc);
  const auto amp = solve_amplitudes(rc, 2.0);
  const double s1 = amp.c[0] * amp.c[0], s2 = amp.c[1] * amp.c[1];
  const auto w = solve_scalar_w(g, 5, 2.0);
  const auto psi = vector_from_amplitudes(amp.c, w.profile);
  const double residual = el_residual(psi, params).weighted_sup;
  const auto direct = solve_vector_direct(g, params);
  const double gap = sup_diff(direct.profile, psi);
  r.pass = std::abs(s1 - 6.0 / 7.0) <= 1e-12 && std::abs(s2 - 2.0 / 7.0) <= 1e-12 && residual <= 1e-6 && gap <= 1e-5;
  r.details = {{"s", {s1, s2}}, {"residual", residual}, {"direct_gap", gap}};
  r.summary = strf("s=(%.15f, %.15f), residual %.2e (tol 1e-6), direct gap %.2e (tol 1e-5)", s1, s2, residual, gap);
  return r;
}

CheckResult gn_three_way() {
  CheckResult r;
  r.title = "GN constant: variational, closed form and ansatz";
  r.pass = true;
  r.details["cases"] = Json::array();
  std::string parts;
  for (double beta : {0.0, 0.01}) {
    const ReducedCoupling rc{{1.0, 1.0}, beta};
    const auto params = make_params(5, 2.0, rc, {.allow_decoupled = beta == 0.0});
    const double tol = beta == 0.0 ? 1e-3 : 1e-2;
    std::vector<double> ratios;
    CrossValidation cv;
    for (int n : {4000, 8000}) {
      auto g = RadialGrid::make(5, 20.0, n);
      const auto gn = minimize_J(g, params);
      cv = cross_validate(gn, solve_scalar_w(g, 5, 2.0).profile, rc, params, tol);
      ratios.push_back(cv.closed_over_variational);
    }
    const bool ansatz_ok = cv.ansatz_outcome == "PASS";
    const bool closed_ok = cv.outcome == "PASS";
    const bool converged_gap = rel(ratios[1], ratios[0]) <= 1e-3;
    r.pass = r.pass && ansatz_ok && (closed_ok || converged_gap);
    if (!closed_ok) {
      r.findings.push_back(strf("beta=%g: closed form / variational = %.6f at n=4000, %.6f at n=8000 (grid-converged)",
                                beta, ratios[0], ratios[1]));
    }
    auto j = to_json(cv);
    j["beta"] = beta;
    j["closed_over_variational_by_grid"] = ratios;
    r.details["cases"].push_back(j);
    parts += strf("%sbeta=%g: ansatz gap %.1e (tol %.0e), closed/var %.4f", parts.empty() ? "" : "; ", beta,
                  cv.gap_variational_ansatz, tol, cv.closed_over_variational);
  }
  r.summary = parts;
  return r;
}

CheckResult gn_sharpness() {
  CheckResult r;
  r.title = "GN inequality with the computed constant";
  auto g = RadialGrid::make(5, 20.0, 4000);
  auto params = make_params(5, 2.0, {{1.0, 1.0}, 0.01});
  const auto gn = minimize_J(g, params);
  const auto rep = check_gn_inequality(gn.C_best, probe_corpus(g, 2, 200, 2024), params, &gn.minimizer);
  r.pass = rep.probes == 200 && rep.violations == 0 && std::abs(rep.minimizer_ratio - 1.0) <= 1e-8;
  r.details = to_json(rep);
  r.details["C"] = gn.C_best;
  r.summary = strf("200 probes: %d violations, max ratio %.4f; minimizer ratio - 1 = %.1e (tol 1e-8)", rep.violations,
                   rep.max_ratio, rep.minimizer_ratio - 1.0);
  return r;
}

CheckResult conservation() {
  CheckResult r;
  r.title = "Mass and energy conservation";
  auto box = PeriodicGrid::make(4, 24, 6.0);
  auto params = make_params(4, 2.0, {{1.0, 1.0}, 0.5}, {.allow_out_of_range = true});
  const auto u0 = gaussian_data(box, 2, 0.5);
  const std::vector<double> taus{4e-3, 2e-3, 1e-3};
  std::vector<double> mass_drift, energy_drift;
  bool aborted = false;
  for (double tau : taus) {
    MonitorConfig mc;
    mc.sample_every = std::lround(0.1 / tau);
    const auto tr = evolve(u0, 1.0, tau, params, mc);
    aborted = aborted || tr.aborted;
    double md = 0.0, ed = 0.0;
    for (const auto& series : tr.mass_series)
      for (double m : series) md = std::max(md, std::abs(m / series.front() - 1.0));
    for (double e : tr.energy_series) ed = std::max(ed, std::abs(e / tr.energy_series.front() - 1.0));
    mass_drift.push_back(md);
    energy_drift.push_back(ed);
  }
  const double order = fitted_order(taus, energy_drift);
  const double worst_mass = *std::max_element(mass_drift.begin(), mass_drift.end());
  r.pass = !aborted && worst_mass <= 1e-10 && energy_drift.back() <= 1e-6 && order >= 1.9;
  r.details = {{"tau", taus}, {"mass_drift", mass_drift}, {"energy_drift", energy_drift}, {"order", order}};
  r.summary = strf("24^4, T=1: mass drift %.1e (tol 1e-10), energy drift at 1e-3 %.2e (tol 1e-6), order %.3f", worst_mass,
                   energy_drift.back(), order);
  return r;
}

CheckResult standing_wave() {
  CheckResult r;
  r.title = "Standing wave keeps its modulus";
  const double p = 2.002;
  auto params = make_params(4, p, {{1.0}, 0.0});
  const auto w = solve_scalar_w(RadialGrid::make(4, 20.0, 4000), 4, p);
  auto box = PeriodicGrid::make(4, 16, 8.0);
  const auto gs = periodic_ground_state(transplant(w.profile, box), params, 3000, 1e-13);
  const auto& u0 = gs.profile;
  std::vector<double> m0(u0.points());
  std::size_t peak_at = 0;
  for (std::size_t i = 0; i < m0.size(); ++i) {
    m0[i] = std::abs(u0.values()[i]);
    if (m0[i] > m0[peak_at]) peak_at = i;
  }
  const double peak = m0[peak_at];
  const double T = 2.0 * std::numbers::pi;
  const long steps = 2000;
  double deviation = 0.0, phase_quarter = std::nan("");
  MonitorConfig mc;
  mc.sample_every = 50;
  mc.on_sample = [&](const SimState& s) {
    for (std::size_t i = 0; i < m0.size(); ++i)
      deviation = std::max(deviation, std::abs(std::abs(s.field.values()[i]) - m0[i]));
    if (s.step_count == steps / 4) phase_quarter = std::arg(s.field.values()[peak_at] / u0.values()[peak_at]);
  };
  const auto tr = evolve(u0, T, T / steps, params, mc, Splitting::yoshida4);
  const bool phase_ok = std::abs(phase_quarter + std::numbers::pi / 2) <= 1e-2;
  r.pass = gs.converged && !tr.aborted && deviation <= 1e-3 && phase_ok;
  r.details = {{"exponent", p},         {"box_points", 16},          {"half_period", 8.0},
               {"steps", steps},        {"scheme", "yoshida4"},      {"polish_residual", gs.residual},
               {"peak", peak},          {"max_deviation", deviation}, {"relative_deviation", deviation / peak},
               {"phase_at_quarter", phase_quarter}};
  r.summary = strf("N=4 p=%g 16^4, t in [0,2pi]: max ||u|-|Psi|| %.2e (tol 1e-3), phase at pi/2 %.4f (expect -pi/2)",
                   p, deviation, phase_quarter);
  r.findings.push_back("profile evolves as exp(-it) Psi under i u_t + Delta^2 u = F(u)");
  return r;
}

CheckResult stable_set() {
  CheckResult r;
  r.title = "Stable-set invariance and kinetic bound";
  const ReducedCoupling rc{{1.0, 1.0}, 2.0};
  auto params = make_params(4, 3.0, rc);
  const auto w = solve_scalar_w(RadialGrid::make(4, 20.0, 4000), 4, 3.0);
  const auto psi = vector_from_amplitudes(solve_amplitudes(rc, 3.0).c, w.profile);
  const double m = certify(psi, params).action_level;
  auto box = PeriodicGrid::make(4, 24, 8.0);
  const double tau = 2e-3;
  MonitorConfig mc;
  mc.sample_every = 25;
  mc.pairs = {{1, 0}, {0, 1}, {1, 1}};
  mc.m_level = m;
  const auto tr = evolve(transplant(0.5 * psi, box), 1.0, tau, params, mc);
  bool start_in = true;
  double worst = 1e300;
  for (std::size_t q = 0; q < mc.pairs.size(); ++q) {
    start_in = start_in && tr.membership_series[q].front() == Membership::A_plus;
    for (std::size_t k = 0; k < tr.samples(); ++k) worst = std::min(worst, tr.K_series[q][k] / tr.K_scale_series[q][k]);
  }
  const auto kb = kinetic_bound_check(tr, m, 4);
  r.pass = !tr.aborted && start_in && worst >= -1e-6 && kb.pass;
  r.details = {{"m_level", m},          {"initial_action", tr.action_series.front()}, {"start_in_A_plus", start_in},
               {"worst_K_over_scale", worst}, {"max_kinetic", kb.max_kinetic},       {"bound", kb.bound},
               {"samples", tr.samples()}};
  r.summary = strf("0.5 Psi, p=3 beta=2, 24^4: A+ at t=0 %s, min K/scale %.3f (>= -1e-6), max kinetic %.2f <= %.2f",
                   start_in ? "yes" : "no", worst, kb.max_kinetic, kb.bound);
  return r;
}

CheckResult mass_critical() {
  CheckResult r;
  r.title = "Mass-critical kinetic bound";
  const ReducedCoupling rc{{1.0, 1.0}, 0.5};
  auto params = make_params(4, 2.0, rc, {.allow_out_of_range = true});
  const double C = minimize_J(RadialGrid::make(4, 20.0, 8000), params).C_best;
  auto box = PeriodicGrid::make(4, 24, 8.0);
  const auto zero = mass_critical_margin(ComplexField(box, 2), params, C);
  const bool zero_ok = zero.factor == 1.0 && zero.ceiling == 2.0 * zero.energy;
  auto u0 = gaussian_data(box, 2, 1.0);
  const auto probe = mass_critical_margin(u0, params, C);
  u0 *= std::sqrt(0.5 * probe.threshold / probe.total_mass);
  MonitorConfig mc;
  mc.sample_every = 10;
  mc.gn_constant = C;
  const auto tr = evolve(u0, 1.0, 2e-3, params, mc);
  const auto& margin = *tr.threshold_margin;
  const double kmax = *std::max_element(tr.kinetic_series.begin(), tr.kinetic_series.end());
  r.pass = zero_ok && !tr.aborted && margin.below_threshold && kmax <= margin.ceiling * (1.0 + 1e-2);
  r.details = {{"C", C},
               {"threshold", margin.threshold},
               {"total_mass", margin.total_mass},
               {"factor", margin.factor},
               {"energy", margin.energy},
               {"ceiling", margin.ceiling},
               {"max_kinetic", kmax},
               {"zero_data_ceiling_is_2E", zero_ok}};
  r.summary = strf("C=%.6e, M_tot=%.2f (half of %.2f): max kinetic %.2f <= ceiling %.2f; zero data ceiling = 2E %s", C,
                   margin.total_mass, margin.threshold, kmax, margin.ceiling, zero_ok ? "yes" : "no");
  return r;
}

using Runner = std::function<CheckResult()>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> presets{
      {"criterion-1", pohozaev_ratios}, {"criterion-2", constraint_vanishing}, {"criterion-3", lie_derivative},
      {"criterion-4", amplitude_route}, {"criterion-5", gn_three_way},         {"criterion-6", gn_sharpness},
      {"criterion-7", conservation},    {"criterion-8", standing_wave},        {"criterion-9", stable_set},
      {"criterion-10", mass_critical}};
  return presets;
}

template <class F>
CheckResult timed(const std::string& id, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r = f();
  r.id = id;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

Json to_json(const CheckResult& r) {
  return {{"id", r.id},           {"title", r.title},       {"pass", r.pass},
          {"summary", r.summary}, {"findings", r.findings}, {"details", r.details}};
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (int k = 1; k <= 10; ++k) v.push_back("criterion-" + std::to_string(k));
    return v;
  }();
  return names;
}

CheckResult run_preset(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ValidationError(ValidationKind::options, "unknown preset '" + name + "'");
  return timed(name, it->second);
}

std::vector<CheckResult> invariant_suite(int dimension, double exponent, ValidationOptions options) {
  const auto params = make_params(dimension, exponent, {{1.0}, 0.0}, options);
  auto g = RadialGrid::make(dimension, 20.0, 8000);
  const auto w = solve_scalar_w(g, dimension, exponent, {}, options);
  std::vector<CheckResult> out;

  out.push_back(timed("pohozaev", [&] {
    CheckResult r;
    r.title = "Pohozaev ratios of w";
    const double err = std::max(std::abs(w.pohozaev.residual_kinetic), std::abs(w.pohozaev.residual_potential));
    r.pass = w.pohozaev.defined && err <= 1e-4;
    r.details = {{"relative_error", err}, {"residual_sup", w.residual_sup}};
    r.summary = strf("relative error %.2e (tol 1e-4)", err);
    return r;
  }));

  out.push_back(timed("constraints", [&] {
    CheckResult r;
    r.title = "K vanishes on w";
    double worst = 0.0;
    for (const auto& c : w.constraint_values) worst = std::max(worst, std::abs(c.K) / w.action_level);
    r.pass = worst <= 1e-4;
    r.details = {{"max_K_over_S", worst}};
    r.summary = strf("max |K|/S over %zu pairs %.2e (tol 1e-4)", w.constraint_values.size(), worst);
    return r;
  }));

  out.push_back(timed("lie-derivative", [&] {
    CheckResult r;
    r.title = "Lie derivative of S";
    auto coarse = RadialGrid::make(dimension, 15.0, 2000);
    double worst = 1e300;
    std::string worst_pair;
    const auto probes = probe_corpus(coarse, 1, 5, 2024);
    for (std::size_t k = 0; k < probes.size(); ++k) {
      for (const auto& pair : default_constraint_pairs()) {
        const double order = lie_derivative_check(probes[k], params, pair).observed_order;
        if (order < worst) {
          worst = order;
          worst_pair = pair_str(pair);
        }
      }
    }
    r.pass = worst >= 1.9;
    r.details = {{"min_order", worst}};
    r.summary = strf("5 probes x 4 pairs: min fitted order %.3f at %s (need >= 1.9)", worst, worst_pair.c_str());
    return r;
  }));

  out.push_back(timed("dilation", [&] {
    CheckResult r;
    r.title = "Dilation action curve";
    const auto mx = dilation_action_max(compute_moments(w.profile, params));
    if (mx.supremum_at_origin) {
      r.pass = dimension == 4;
      r.summary = strf("supremum at t -> 0+, g = %.6g", mx.g_max);
    } else {
      r.pass = std::abs(mx.t_bar - 1.0) <= 1e-3 && rel(mx.g_max, w.action_level) <= 1e-4 && mx.relative_gap <= 1e-6;
      r.summary = strf("t_bar - 1 = %.1e, g_max / S - 1 = %.1e", mx.t_bar - 1.0, mx.g_max / w.action_level - 1.0);
    }
    r.details = {{"t_bar", mx.t_bar}, {"g_max", mx.g_max}, {"action", w.action_level}};
    return r;
  }));

  out.push_back(timed("gn", [&] {
    CheckResult r;
    r.title = "GN constant and inequality";
    auto grid = RadialGrid::make(dimension, 20.0, 4000);
    const auto gn = minimize_J(grid, params);
    const auto rep = check_gn_inequality(gn.C_best, probe_corpus(grid, 1, 50, 2024), params, &gn.minimizer);
    r.pass = rep.violations == 0 && std::abs(rep.minimizer_ratio - 1.0) <= 1e-8;
    r.details = to_json(rep);
    r.details["C"] = gn.C_best;
    r.details["el_residual"] = gn.el_residual;
    r.summary = strf("C=%.6e, EL residual %.1e, 50 probes: %d violations, minimizer ratio - 1 = %.1e", gn.C_best,
                     gn.el_residual, rep.violations, rep.minimizer_ratio - 1.0);
    return r;
  }));
  return out;
}

}  // namespace bcnls
