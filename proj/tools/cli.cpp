#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "bcnls/checks.hpp"
#include "bcnls/io.hpp"

namespace bcnls::cli {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------------------------
// Option groups

struct ParamsInput {
  std::string config;
  std::optional<int> dimension;
  std::optional<double> exponent;
  std::vector<double> mu;
  std::optional<double> beta;
  std::vector<double> coupling;
  bool allow_out_of_range = false;
  bool allow_decoupled = false;

  void attach(CLI::App& app, bool need_system = true) {
    app.add_option("--config", config, "JSON file with dimension, components, exponent, coupling")
        ->check(CLI::ExistingFile);
    app.add_option("--dimension", dimension, "space dimension N");
    app.add_option("--exponent", exponent, "nonlinearity exponent p");
    if (need_system) {
      app.add_option("--mu", mu, "diagonal coupling mu_1,...,mu_m")->delimiter(',');
      app.add_option("--beta", beta, "off-diagonal coupling");
      app.add_option("--coupling", coupling, "full coupling matrix, row-major")->delimiter(',');
      app.add_flag("--allow-decoupled", allow_decoupled, "admit beta = 0");
    }
    app.add_flag("--allow-out-of-range", allow_out_of_range, "admit N < 4 and p outside (p_*, p^*)");
  }

  Json to_config() const {
    const bool inline_given = dimension || exponent || !mu.empty() || beta || !coupling.empty();
    if (!config.empty() && inline_given) {
      throw ValidationError(ValidationKind::options, "give --config or inline parameters, not both");
    }
    Json j;
    if (!config.empty()) {
      j = read_json_file(config);
    } else {
      if (!dimension || !exponent) throw ValidationError(ValidationKind::options, "--dimension and --exponent are required");
      j["dimension"] = *dimension;
      j["exponent"] = *exponent;
      if (!coupling.empty()) {
        if (!mu.empty() || beta) throw ValidationError(ValidationKind::options, "give --coupling or --mu/--beta, not both");
        const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(coupling.size()))));
        j["components"] = m;
        j["coupling_matrix"] = coupling;
      } else {
        const std::vector<double> m = mu.empty() ? std::vector<double>{1.0} : mu;
        if (m.size() > 1 && !beta) throw ValidationError(ValidationKind::options, "missing --beta for a coupled system");
        j["components"] = m.size();
        j["mu"] = m;
        j["beta"] = beta.value_or(1.0);
      }
    }
    if (allow_out_of_range) j["allow_out_of_range"] = true;
    if (allow_decoupled) j["allow_decoupled"] = true;
    return j;
  }
};

struct RadialInput {
  double radius = 20.0;
  int points = 4000;

  void attach(CLI::App& app) {
    app.add_option("--radius", radius, "radial truncation R")->capture_default_str();
    app.add_option("--points", points, "radial nodes n")->capture_default_str();
  }
  Json to_json() const { return {{"radius", radius}, {"points", points}}; }
};

struct Common {
  std::string report;
  std::uint64_t seed = 2024;
  bool deterministic = false;

  void attach(CLI::App& app) {
    app.add_option("--report", report, "JSON report path; the CSV goes next to it with a .csv extension");
    app.add_option("--seed", seed, "seed for randomized probes")->capture_default_str();
    app.add_flag("--deterministic", deterministic, "fixed reduction order (recorded in provenance)");
  }
};

void emit(const Common& common, const Json& config, const std::vector<std::pair<std::string, std::uint64_t>>& grids,
          Json body, const CsvTable& csv) {
  if (common.report.empty()) return;
  Json out;
  out["provenance"] = provenance(config, common.seed, grids);
  out["result"] = std::move(body);
  const fs::path path(common.report);
  write_json(path, out);
  auto csv_path = path;
  csv_path.replace_extension(".csv");
  write_text(csv_path, csv.str());
}

PetviashviliOptions solver_options(double tol, int max_iter) {
  PetviashviliOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  check_options(o);
  return o;
}

std::vector<ScalingPair> parse_pairs(const std::string& text) {
  std::vector<ScalingPair> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError(ValidationKind::invalid_pair, "expected a:b, got '" + item + "'");
    try {
      out.push_back(checked_pair(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))));
    } catch (const std::invalid_argument&) {
      throw ValidationError(ValidationKind::invalid_pair, "expected numbers in '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  double start = 0, stop = 0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 || is.peek() != EOF) {
    throw ValidationError(ValidationKind::options, "--beta-grid expects start:stop:count, got '" + text + "'");
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) v[k] = count == 1 ? start : start + (stop - start) * k / (count - 1);
  return v;
}

bool is_unit_scalar(const ValidatedParams& p) { return p.components() == 1 && p.a(0, 0) == 1.0; }

GroundStateResult solve_ground_state(const RadialGridPtr& grid, const ValidatedParams& params,
                                     const PetviashviliOptions& opts) {
  if (is_unit_scalar(params)) {
    return solve_scalar_w(grid, params.dimension(), params.exponent(), opts, params.options());
  }
  return solve_vector_direct(grid, params, opts);
}

// ---------------------------------------------------------------------------------------------
// Subcommands

struct GroundstateCmd {
  ParamsInput params;
  RadialInput grid;
  Common common;
  double tol = 1e-10;
  int max_iter = 20000;
  std::string out;

  void attach(CLI::App& app) {
    params.attach(app);
    grid.attach(app);
    common.attach(app);
    app.add_option("--tol", tol, "solver tolerance")->capture_default_str();
    app.add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    app.add_option("--out", out, "snapshot path for the profile");
  }

  int operator()() const {
    const auto cfg = params.to_config();
    const auto p = params_from_json(cfg);
    auto g = RadialGrid::make(p.dimension(), grid.radius, grid.points);
    const auto gs = solve_ground_state(g, p, solver_options(tol, max_iter));
    std::printf("action %.17g  residual %.3e  iterations %d  %s\n", gs.action_level, gs.residual_sup, gs.iterations,
                gs.semi_trivial && p.components() > 1 ? "semi-trivial" : "");
    if (gs.pohozaev.defined) {
      std::printf("pohozaev residuals %.3e %.3e\n", gs.pohozaev.residual_kinetic, gs.pohozaev.residual_potential);
    }
    if (!out.empty()) write_snapshot(out, gs.profile);
    const auto report = functional_report(compute_moments(gs.profile, p), ScalingPair{1, 0});
    Json body = to_json(gs);
    body["functionals"] = to_json(report);
    Json echo{{"subcommand", "groundstate"}, {"params", params_to_json(p)}, {"grid", grid.to_json()},
              {"tol", tol},                  {"max_iter", max_iter},           {"deterministic", common.deterministic}};
    emit(common, echo, {{"radial", g->fingerprint()}}, body, functional_csv(report));
    return ok;
  }
};

struct ClassifyCmd {
  ParamsInput params;
  RadialInput grid;
  Common common;
  std::string beta_grid;
  double tol = 1e-10;

  void attach(CLI::App& app) {
    params.attach(app, false);
    app.add_option("--mu", mu, "diagonal coupling mu_1,...,mu_m")->delimiter(',')->required();
    app.add_option("--beta-grid", beta_grid, "start:stop:count")->required();
    app.add_option("--tol", tol, "solver tolerance")->capture_default_str();
    grid.points = 2000;
    grid.attach(app);
    common.attach(app);
  }
  std::vector<double> mu;

  int operator()() const {
    if (!params.config.empty()) throw ValidationError(ValidationKind::options, "classify-beta takes inline parameters");
    if (!params.dimension || !params.exponent) {
      throw ValidationError(ValidationKind::options, "--dimension and --exponent are required");
    }
    const auto betas = parse_grid(beta_grid);
    ValidationOptions vo{.allow_out_of_range = params.allow_out_of_range};
    auto g = RadialGrid::make(*params.dimension, grid.radius, grid.points);
    const auto rep = classify_beta(g, *params.dimension, *params.exponent, mu, betas, solver_options(tol, 20000), vo);
    for (const auto& row : rep.rows) {
      std::printf("beta %-10g %-13s semi-trivial S %.10g", row.beta, row.classification.c_str(), row.semi_trivial_action);
      if (row.vector_action) std::printf("  vector S %.10g", *row.vector_action);
      std::printf("\n");
    }
    if (rep.crossover) std::printf("crossover between beta %g and %g\n", rep.crossover->first, rep.crossover->second);
    Json echo{{"subcommand", "classify-beta"}, {"dimension", *params.dimension}, {"exponent", *params.exponent},
              {"mu", mu},                      {"beta_grid", beta_grid},         {"grid", grid.to_json()},
              {"tol", tol},                    {"allow_out_of_range", params.allow_out_of_range},
              {"deterministic", common.deterministic}};
    emit(common, echo, {{"radial", g->fingerprint()}}, to_json(rep), beta_sweep_csv(rep));
    return ok;
  }
};

struct GnCmd {
  ParamsInput params;
  RadialInput grid;
  Common common;
  bool validate_closed_form = false;
  int probes = 0;
  std::string method = "el";
  std::string out;

  void attach(CLI::App& app) {
    params.attach(app);
    grid.attach(app);
    common.attach(app);
    app.add_flag("--validate", validate_closed_form, "compare with the closed form and the ansatz");
    app.add_option("--probes", probes, "size of the seeded inequality corpus")->capture_default_str();
    app.add_option("--method", method, "el or gradient")->check(CLI::IsMember({"el", "gradient"}))->capture_default_str();
    app.add_option("--out", out, "snapshot path for the normalized minimizer");
  }

  int operator()() const {
    const auto cfg = params.to_config();
    const auto p = params_from_json(cfg);
    auto g = RadialGrid::make(p.dimension(), grid.radius, grid.points);
    GNOptions opts;
    opts.method = method == "el" ? GNMethod::euler_lagrange : GNMethod::gradient_flow;
    const auto gn = minimize_J(g, p, opts);
    std::printf("alpha %.17g  C %.17g  EL residual %.3e  selected %s\n", gn.alpha_min, gn.C_best, gn.el_residual,
                gn.selected.c_str());
    Json body{{"gn", to_json(gn)}};
    CsvTable csv{{"alpha_min", "C_best", "el_residual", "semi_trivial"},
                 {{format_double(gn.alpha_min), format_double(gn.C_best), format_double(gn.el_residual),
                   gn.semi_trivial ? "true" : "false"}}};
    if (validate_closed_form) {
      std::vector<double> mu;
      double beta = 0.0;
      for (int j = 0; j < p.components(); ++j) mu.push_back(p.a(j, j));
      if (p.components() > 1) beta = p.a(0, 1);
      const auto w = solve_scalar_w(g, p.dimension(), p.exponent(), {}, p.options());
      const auto cv = cross_validate(gn, w.profile, {mu, beta}, p);
      std::printf("closed form %.17g (%s)  ansatz %.17g (%s)\n", cv.closed_form_C, cv.outcome.c_str(), cv.ansatz_C,
                  cv.ansatz_outcome.c_str());
      body["cross_validation"] = to_json(cv);
      for (const char* h : {"closed_form_C", "closed_outcome", "ansatz_C", "ansatz_outcome"}) csv.header.push_back(h);
      csv.rows[0].insert(csv.rows[0].end(),
                         {format_double(cv.closed_form_C), cv.outcome, format_double(cv.ansatz_C), cv.ansatz_outcome});
    }
    if (probes > 0) {
      const auto rep = check_gn_inequality(gn.C_best, probe_corpus(g, p.components(), probes, common.seed), p, &gn.minimizer);
      std::printf("probes %d  violations %d  max ratio %.6f  minimizer ratio %.15f\n", rep.probes, rep.violations,
                  rep.max_ratio, rep.minimizer_ratio);
      body["inequality"] = to_json(rep);
      for (const char* h : {"probes", "violations", "max_ratio"}) csv.header.push_back(h);
      csv.rows[0].insert(csv.rows[0].end(), {std::to_string(rep.probes), std::to_string(rep.violations),
                                             format_double(rep.max_ratio)});
    }
    if (!out.empty()) write_snapshot(out, gn.minimizer);
    Json echo{{"subcommand", "gn"},     {"params", params_to_json(p)}, {"grid", grid.to_json()},
              {"validate", validate_closed_form}, {"probes", probes}, {"method", method},
              {"deterministic", common.deterministic}};
    emit(common, echo, {{"radial", g->fingerprint()}}, body, csv);
    return ok;
  }
};

struct EvolveCmd {
  ParamsInput params;
  Common common;
  std::string init = "gaussian";
  double amplitude = 1.0;
  double sigma = 1.0;
  double box = 8.0;
  int points = 24;
  double dt = 1e-3;
  double T = 1.0;
  std::string pairs;
  std::optional<double> m_level;
  std::optional<double> gn_constant;
  bool check_threshold = false;
  long sample_every = 0;
  long snapshot_every = 0;
  std::string snapshot_dir = "snapshots";
  std::string scheme = "strang";
  bool polish = false;
  RadialInput radial;

  void attach(CLI::App& app) {
    params.attach(app);
    common.attach(app);
    app.add_option("--init", init, "gaussian, groundstate, or a snapshot path")->capture_default_str();
    app.add_option("--amplitude", amplitude, "scale applied to the initial data")->capture_default_str();
    app.add_option("--sigma", sigma, "Gaussian width")->capture_default_str();
    app.add_option("--box", box, "half period L of the box [-L, L)^N")->capture_default_str();
    app.add_option("--points", points, "lattice points per dimension")->capture_default_str();
    app.add_option("--dt", dt, "time step")->capture_default_str();
    app.add_option("--T", T, "final time")->capture_default_str();
    app.add_option("--pairs", pairs, "scaling pairs a:b,a:b for K monitors");
    app.add_option("--m-level", m_level, "ground-state level for stable-set membership and the kinetic bound");
    app.add_option("--gn-constant", gn_constant, "GN constant for the mass-critical margin");
    app.add_flag("--check-threshold", check_threshold, "report the mass-critical margin (needs --gn-constant)");
    app.add_option("--sample-every", sample_every, "steps between monitor samples (default about 100 samples)");
    app.add_option("--snapshot-every", snapshot_every, "steps between snapshots (0 disables)");
    app.add_option("--snapshot-dir", snapshot_dir, "directory for snapshots")->capture_default_str();
    app.add_option("--scheme", scheme, "strang or yoshida4")
        ->check(CLI::IsMember({"strang", "yoshida4"}))
        ->capture_default_str();
    app.add_flag("--polish", polish, "refine ground-state data into a stationary state on the box");
    app.add_option("--radius", radial.radius, "radial R for --init groundstate")->capture_default_str();
    app.add_option("--radial-points", radial.points, "radial n for --init groundstate")->capture_default_str();
  }

  ComplexField initial_data(const PeriodicGridPtr& grid, const ValidatedParams& p) const {
    const int m = p.components();
    if (init == "gaussian") return gaussian_data(grid, m, amplitude, sigma);
    std::optional<RadialField> radial_profile;
    if (init == "groundstate") {
      auto g = RadialGrid::make(p.dimension(), radial.radius, radial.points);
      radial_profile = solve_ground_state(g, p, {}).profile;
    } else {
      auto snap = read_snapshot(init);
      if (auto* u = std::get_if<ComplexField>(&snap.field)) {
        if (!u->grid().same_as(*grid) || u->components() != m) {
          throw ValidationError(ValidationKind::options, "snapshot " + init + " does not match the box or components");
        }
        ComplexField out = *u;
        out *= amplitude;
        return out;
      }
      radial_profile = std::get<RadialField>(snap.field);
      if (radial_profile->components() != m) {
        throw ValidationError(ValidationKind::options, "snapshot " + init + " has the wrong number of components");
      }
    }
    ComplexField u = transplant(*radial_profile, grid);
    if (polish) {
      const auto gs = periodic_ground_state(u, p, 3000, 1e-13);
      if (!gs.converged) throw ConvergenceError("box polish did not converge", gs.iterations, gs.residual);
      u = gs.profile;
    }
    u *= amplitude;
    return u;
  }

  int operator()() const {
    const auto cfg = params.to_config();
    const auto p = params_from_json(cfg);
    const double n = p.dimension();
    const bool mass_critical = std::abs(p.exponent() - (1.0 + 4.0 / n)) <= 1e-12;
    if (check_threshold && !gn_constant) {
      throw ValidationError(ValidationKind::options, "--check-threshold needs --gn-constant (the GN constant C)");
    }
    if (check_threshold && !mass_critical) {
      throw ValidationError(ValidationKind::options, "--check-threshold applies only at p = 1 + 4/N");
    }
    if (!(dt > 0.0) || !(T > 0.0)) throw ValidationError(ValidationKind::options, "--dt and --T must be positive");
    auto grid = PeriodicGrid::make(p.dimension(), points, box);
    const auto u0 = initial_data(grid, p);
    const long steps = std::lround(T / dt);

    MonitorConfig mc;
    mc.sample_every = sample_every > 0 ? sample_every : std::max(1L, steps / 100);
    if (snapshot_every > 0) {
      mc.sample_every = std::gcd(mc.sample_every, snapshot_every);
      fs::create_directories(snapshot_dir);
      const fs::path dir(snapshot_dir);
      const long every = snapshot_every;
      mc.on_sample = [dir, every](const SimState& s) {
        if (s.step_count % every == 0) {
          char name[64];
          std::snprintf(name, sizeof(name), "step_%09ld.bin", s.step_count);
          write_snapshot(dir / name, s.field, s.time);
        }
      };
    }
    mc.pairs = parse_pairs(pairs);
    mc.m_level = m_level;
    if (check_threshold) mc.gn_constant = gn_constant;

    const auto tr = evolve(u0, T, dt, p, mc, scheme == "strang" ? Splitting::strang : Splitting::yoshida4);
    Json body = to_json(tr);
    if (m_level) {
      const auto kb = kinetic_bound_check(tr, *m_level, p.dimension());
      body["kinetic_bound"] = {{"pass", kb.pass}, {"max_kinetic", kb.max_kinetic}, {"bound", kb.bound}};
      std::printf("kinetic max %.10g  bound %.10g  %s\n", kb.max_kinetic, kb.bound, kb.pass ? "ok" : "exceeded");
    }
    if (tr.threshold_margin) {
      const auto& mg = *tr.threshold_margin;
      std::printf("mass %.10g  threshold %.10g  ceiling %.10g  %s\n", mg.total_mass, mg.threshold, mg.ceiling,
                  mg.below_threshold ? "below threshold" : "at or above threshold");
    }
    std::printf("samples %zu  final time %.10g  %s\n", tr.samples(), tr.final_state.time,
                tr.aborted ? ("aborted: " + tr.abort_reason).c_str() : "completed");
    Json echo{{"subcommand", "evolve"},
              {"params", params_to_json(p)},
              {"init", init},
              {"amplitude", amplitude},
              {"sigma", sigma},
              {"box", box},
              {"points", points},
              {"dt", dt},
              {"T", T},
              {"pairs", pairs},
              {"m_level", m_level ? Json(*m_level) : Json(nullptr)},
              {"gn_constant", gn_constant ? Json(*gn_constant) : Json(nullptr)},
              {"check_threshold", check_threshold},
              {"sample_every", mc.sample_every},
              {"snapshot_every", snapshot_every},
              {"scheme", scheme},
              {"polish", polish},
              {"radial", radial.to_json()},
              {"deterministic", common.deterministic}};
    emit(common, echo, {{"box", grid->fingerprint()}}, body, trajectory_csv(tr));
    if (tr.aborted) {
      std::fprintf(stderr, "simulation aborted at t=%.6g: %s\n", tr.last_reliable_time, tr.abort_reason.c_str());
      return aborted;
    }
    return ok;
  }
};

struct CheckCmd {
  std::vector<std::string> presets;
  std::optional<int> dimension;
  std::optional<double> exponent;
  bool allow_out_of_range = false;
  Common common;

  void attach(CLI::App& app) {
    app.add_option("--preset", presets, "acceptance preset name, or 'all' (repeatable)");
    app.add_option("--dimension", dimension, "space dimension N for the invariant suite");
    app.add_option("--exponent", exponent, "exponent p for the invariant suite");
    app.add_flag("--allow-out-of-range", allow_out_of_range, "admit parameters outside the admissible range");
    common.attach(app);
  }

  int operator()() const {
    std::vector<CheckResult> results;
    Json echo{{"subcommand", "check"}};
    if (!presets.empty()) {
      if (dimension || exponent) throw ValidationError(ValidationKind::options, "give --preset or --dimension/--exponent");
      std::vector<std::string> names;
      for (const auto& name : presets) {
        if (name == "all") {
          names.insert(names.end(), preset_names().begin(), preset_names().end());
        } else {
          names.push_back(name);
        }
      }
      echo["presets"] = names;
      for (const auto& name : names) {
        results.push_back(run_preset(name));
        print(results.back());
      }
    } else {
      if (!dimension || !exponent) {
        throw ValidationError(ValidationKind::options, "check needs --preset or --dimension and --exponent");
      }
      echo["dimension"] = *dimension;
      echo["exponent"] = *exponent;
      echo["allow_out_of_range"] = allow_out_of_range;
      results = invariant_suite(*dimension, *exponent, {.allow_out_of_range = allow_out_of_range});
      for (const auto& r : results) print(r);
    }
    bool all = true;
    Json body = Json::array();
    CsvTable csv{{"id", "pass", "seconds", "summary"}, {}};
    for (const auto& r : results) {
      all = all && r.pass;
      body.push_back(to_json(r));
      csv.rows.push_back({r.id, r.pass ? "PASS" : "FAIL", format_double(r.seconds), r.summary});
    }
    emit(common, echo, {}, body, csv);
    return all ? ok : check_failed;
  }

  static void print(const CheckResult& r) {
    std::printf("%-14s %s  %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.summary.c_str());
    for (const auto& f : r.findings) std::printf("%-14s       finding: %s\n", "", f.c_str());
    std::fflush(stdout);
  }
};

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Biharmonic coupled NLS: ground states, GN constants and split-step dynamics", "bcnls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BCNLS_VERSION);

  GroundstateCmd groundstate;
  ClassifyCmd classify;
  GnCmd gn;
  EvolveCmd evolve_cmd;
  CheckCmd check;
  auto* s_gs = app.add_subcommand("groundstate", "solve for the ground state on a radial grid");
  auto* s_cb = app.add_subcommand("classify-beta", "semi-trivial against vector action over a beta sweep");
  auto* s_gn = app.add_subcommand("gn", "sharp Gagliardo-Nirenberg constant by minimizing J");
  auto* s_ev = app.add_subcommand("evolve", "split-step evolution on a periodic box with monitors");
  auto* s_ck = app.add_subcommand("check", "acceptance presets or the invariant suite for (N, p)");
  groundstate.attach(*s_gs);
  classify.attach(*s_cb);
  gn.attach(*s_gn);
  evolve_cmd.attach(*s_ev);
  check.attach(*s_ck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.back()->help());
    return usage;
  }

  try {
    if (*s_gs) return groundstate();
    if (*s_cb) return classify();
    if (*s_gn) return gn();
    if (*s_ev) return evolve_cmd();
    return check();
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return invalid;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return invalid;
  } catch (const GridMismatch& e) {
    std::fprintf(stderr, "grid mismatch: %s\n", e.what());
    return invalid;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return invalid;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "no convergence after %d iterations (residual %.3e): %s\n", e.iterations(), e.residual(),
                 e.what());
    return no_convergence;
  } catch (const SimulationAbort& e) {
    std::fprintf(stderr, "simulation aborted at t=%.6g: %s\n", e.last_reliable_time(), e.what());
    return aborted;
  }
}

}  // namespace bcnls::cli
