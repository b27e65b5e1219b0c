#include "bcnls/groundstate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "bcnls/diagnostics.hpp"
#include "petviashvili.hpp"

namespace bcnls {
namespace {

constexpr double kActiveThreshold = 1e-8;

std::vector<bool> active_components(const RadialField& u) {
  const double peak = u.sup_norm();
  std::vector<bool> active;
  for (int j = 0; j < u.components(); ++j) active.push_back(peak > 0.0 && u.sup_norm(j) > kActiveThreshold * peak);
  return active;
}

bool is_semi_trivial(const std::vector<bool>& active) {
  return std::count(active.begin(), active.end(), true) <= 1;
}

// Petviashvili on the stationary operator, then certification.
GroundStateResult run(RadialField init, const ValidatedParams& params, const PetviashviliOptions& opts,
                      Normalization mode) {
  auto engine = detail::petviashvili(std::move(init), params, 1.0, 1.0, mode, opts);
  if (!engine.converged) {
    std::ostringstream os;
    os << "Petviashvili iteration (" << to_string(mode) << " normalization) did not converge: residual "
       << engine.residual << ", |M - 1| = " << engine.m_defect << " after " << engine.iterations << " iterations";
    throw ConvergenceError(os.str(), engine.iterations, std::max(engine.residual, engine.m_defect));
  }
  auto result = certify(std::move(engine.u), params);
  result.iterations = engine.iterations;
  result.normalization_used = mode;
  return result;
}

}  // namespace

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::shared: return "shared";
    case Normalization::per_component: return "per-component";
    case Normalization::automatic: return "automatic";
  }
  return "unknown";
}

void check_options(const PetviashviliOptions& opts) {
  if (!(opts.tol > 0.0)) throw ValidationError(ValidationKind::options, "tol must be > 0");
  if (opts.gamma != 0.0 && !(opts.gamma > 1.0 && opts.gamma < 3.0)) {
    throw ValidationError(ValidationKind::options, "gamma must lie in (1, 3)");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw ValidationError(ValidationKind::options, "damping must lie in (0, 1]");
  }
  if (opts.max_iter < 1) throw ValidationError(ValidationKind::options, "max_iter must be >= 1");
  if (!(opts.initial_width > 0.0)) throw ValidationError(ValidationKind::options, "initial width must be > 0");
}

const std::vector<ScalingPair>& default_constraint_pairs() {
  static const std::vector<ScalingPair> pairs{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 3.0}};
  return pairs;
}

PohozaevDiagnostics pohozaev_residuals(const RadialField& psi, const ValidatedParams& params) {
  const auto m = compute_moments(psi, params);
  PohozaevDiagnostics d;
  const double n = params.dimension();
  const double p = params.exponent();
  const double denom = params.pohozaev_denominator();
  d.expected_kinetic = n * (p - 1.0) / denom;
  d.expected_potential = 4.0 * p / denom;
  if (!(m.l2 > 0.0)) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    d.ratio_kinetic = d.ratio_potential = d.residual_kinetic = d.residual_potential = nan;
    return d;
  }
  d.defined = true;
  d.ratio_kinetic = m.kinetic / m.l2;
  d.ratio_potential = m.interaction / m.l2;
  d.residual_kinetic = d.ratio_kinetic / d.expected_kinetic - 1.0;
  d.residual_potential = d.ratio_potential / d.expected_potential - 1.0;
  return d;
}

PositivityReport positivity(std::span<const double> profile, const RadialGrid& grid) {
  PositivityReport r;
  r.first_sign_change = std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    lo = std::min(lo, profile[i]);
    hi = std::max(hi, profile[i]);
    if (profile[i] <= 0.0 && std::isinf(r.first_sign_change)) r.first_sign_change = grid.nodes()[i];
  }
  r.core_positive = !profile.empty() && profile[0] > 0.0;
  r.min_relative = hi > 0.0 ? lo / hi : 0.0;
  return r;
}

GroundStateResult certify(RadialField profile, const ValidatedParams& params) {
  GroundStateResult r;
  const auto moments = compute_moments(profile, params);
  const auto el = el_residual(profile, params);
  r.residual_sup = el.weighted_sup;
  r.raw_residual_sup = el.raw_sup;
  r.action_level = action(moments);
  for (const auto& pair : default_constraint_pairs()) r.constraint_values.push_back({pair, constraint_K(moments, pair)});
  r.pohozaev = pohozaev_residuals(profile, params);
  r.component_masses = moments.mass_per_component;
  r.active = active_components(profile);
  r.semi_trivial = is_semi_trivial(r.active);
  for (int j = 0; j < profile.components(); ++j) r.positivity.push_back(positivity(profile[j], profile.grid()));
  r.profile = std::move(profile);
  return r;
}

GroundStateResult solve_scalar_w(const RadialGridPtr& grid, int dimension, double exponent,
                                 const PetviashviliOptions& opts, ValidationOptions validation) {
  const auto params = make_params(dimension, exponent, {{1.0}, 0.0}, validation);
  if (grid->dimension() != dimension) throw GridMismatch("grid dimension differs from N");
  PetviashviliOptions o = opts;
  GroundStateResult result;
  for (int restart = 0;; ++restart) {
    result = run(detail::gaussian_guess(grid, 1, o), params, o, Normalization::shared);
    result.restarts = restart;
    if (result.positivity[0].core_positive) break;
    if (restart == 2) {
      warn("scalar profile is not positive at the origin after 2 restarts");
      break;
    }
    warn("scalar profile is negative at the origin; restarting from a wider Gaussian");
    o.initial_width *= 2.0;
  }
  return result;
}

GroundStateResult solve_vector_direct(const RadialGridPtr& grid, const ValidatedParams& params,
                                      const PetviashviliOptions& opts, const std::optional<RadialField>& init) {
  if (grid->dimension() != params.dimension()) throw GridMismatch("grid dimension differs from N");
  RadialField start = init ? *init : detail::gaussian_guess(grid, params.components(), opts);
  require_same_grid(*grid, start.grid());
  if (start.components() != params.components()) throw GridMismatch("initial guess has the wrong component count");

  if (opts.normalization != Normalization::automatic || params.components() == 1) {
    const auto mode = opts.normalization == Normalization::per_component ? Normalization::per_component
                                                                           : Normalization::shared;
    return run(std::move(start), params, opts, mode);
  }
  std::optional<GroundStateResult> shared;
  std::optional<ConvergenceError> shared_error;
  try {
    shared = run(start, params, opts, Normalization::shared);
    if (!shared->semi_trivial) return *shared;
  } catch (const ConvergenceError& e) {
    shared_error = e;
  }
  try {
    auto per = run(std::move(start), params, opts, Normalization::per_component);
    if (!per.semi_trivial || !shared) return per;
  } catch (const ConvergenceError&) {
    if (!shared) throw *shared_error;
  }
  return *shared;
}

AmplitudeSolution solve_amplitudes(const ReducedCoupling& rc, double exponent) {
  const int m = static_cast<int>(rc.mu.size());
  if (m < 1) throw ValidationError(ValidationKind::components, "need at least one amplitude");
  for (double mu : rc.mu) {
    if (!(mu > 0.0)) throw ValidationError(ValidationKind::coupling_positivity, "mu_j must be > 0");
  }
  if (!(rc.beta >= 0.0)) throw ValidationError(ValidationKind::coupling_positivity, "beta must be >= 0");
  if (!(exponent > 1.0)) throw ValidationError(ValidationKind::exponent_range, "p must be > 1");
  const double p = exponent;
  const double mu_min = *std::min_element(rc.mu.begin(), rc.mu.end());
  const double mu_max = *std::max_element(rc.mu.begin(), rc.mu.end());

  AmplitudeSolution sol;
  sol.hypothesis_satisfied = p == 2.0 && m > 1 && rc.beta > 0.0 && (rc.beta < mu_min || rc.beta > mu_max);

  auto residual_of = [&](const std::vector<double>& c) {
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
      double cross = 0.0;
      for (int k = 0; k < m; ++k)
        if (k != j) cross += std::pow(c[k], p);
      const double g = rc.mu[j] * std::pow(c[j], 2.0 * p - 2.0) + rc.beta * cross * std::pow(c[j], p - 2.0) - 1.0;
      worst = std::max(worst, std::abs(g));
    }
    return worst;
  };

  if (rc.beta == 0.0 || m == 1) {
    for (double mu : rc.mu) sol.c.push_back(std::pow(mu, -1.0 / (2.0 * p - 2.0)));
    sol.residual = residual_of(sol.c);
    return sol;
  }

  if (p == 2.0) {
    // mu_j s_j + beta sum_{k != j} s_k = 1 with s = c^2; Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> a(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m) + 1));
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) a[j][k] = j == k ? rc.mu[j] : rc.beta;
      a[j][m] = 1.0;
    }
    double scale = mu_max + rc.beta;
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (std::abs(a[piv][col]) <= 1e-13 * scale) {
        throw DomainError("amplitude system is singular (beta equals a diagonal entry mu_j)");
      }
      std::swap(a[piv], a[col]);
      for (int r = col + 1; r < m; ++r) {
        const double f = a[r][col] / a[col][col];
        for (int k = col; k <= m; ++k) a[r][k] -= f * a[col][k];
      }
    }
    std::vector<double> s(static_cast<std::size_t>(m));
    for (int j = m - 1; j >= 0; --j) {
      double t = a[j][m];
      for (int k = j + 1; k < m; ++k) t -= a[j][k] * s[k];
      s[j] = t / a[j][j];
    }
    for (int j = 0; j < m; ++j) {
      if (!(s[j] > 0.0)) {
        throw DomainError(std::string("no positive amplitude solution at p = 2") +
                          (sol.hypothesis_satisfied ? "" : " (requires beta < min mu or beta > max mu)"));
      }
      sol.c.push_back(std::sqrt(s[j]));
    }
    sol.residual = residual_of(sol.c);
    return sol;
  }

  auto eval = [&](const std::vector<double>& x, std::vector<double>& g, std::vector<std::vector<double>>* jac) {
    std::vector<double> xp(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) xp[k] = std::pow(x[k], p);
    double total = 0.0;
    for (double v : xp) total += v;
    for (int j = 0; j < m; ++j) {
      const double cross = total - xp[j];
      g[j] = rc.mu[j] * std::pow(x[j], 2.0 * p - 2.0) + rc.beta * cross * std::pow(x[j], p - 2.0) - 1.0;
      if (!jac) continue;
      for (int k = 0; k < m; ++k) {
        (*jac)[j][k] = k == j ? rc.mu[j] * (2.0 * p - 2.0) * std::pow(x[j], 2.0 * p - 3.0) +
                                    rc.beta * cross * (p - 2.0) * std::pow(x[j], p - 3.0)
                              : rc.beta * p * std::pow(x[k], p - 1.0) * std::pow(x[j], p - 2.0);
      }
    }
  };
  std::vector<double> g(static_cast<std::size_t>(m)), trial(static_cast<std::size_t>(m)), gt(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> jac(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m)));
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };
  const auto newton = [&](std::vector<double> c) -> std::optional<std::vector<double>> {
  for (int it = 0; it < 200; ++it) {
    eval(c, g, &jac);
    if (norm(g) <= 1e-14) break;
    // Solve jac * step = g.
    auto a = jac;
    std::vector<double> rhs = g;
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (a[piv][col] == 0.0) return std::nullopt;
      std::swap(a[piv], a[col]);
      std::swap(rhs[piv], rhs[col]);
      for (int r = col + 1; r < m; ++r) {
        const double f = a[r][col] / a[col][col];
        for (int k = col; k < m; ++k) a[r][k] -= f * a[col][k];
        rhs[r] -= f * rhs[col];
      }
    }
    std::vector<double> step(static_cast<std::size_t>(m));
    for (int j = m - 1; j >= 0; --j) {
      double t = rhs[j];
      for (int k = j + 1; k < m; ++k) t -= a[j][k] * step[k];
      step[j] = t / a[j][j];
    }
    double t = 1.0;
    for (; t > 1e-6; t *= 0.5) {
      bool positive = true;
      for (int k = 0; k < m; ++k) {
        trial[k] = c[k] - t * step[k];
        positive = positive && trial[k] > 0.0;
      }
      if (!positive) continue;
      eval(trial, gt, nullptr);
      if (norm(gt) < norm(g)) break;
    }
    if (t <= 1e-6) break;
    c = trial;
  }
  if (!(residual_of(c) <= 1e-12)) return std::nullopt;
  return c;
  };

  // Damped Newton from the symmetric guess, then from a lattice of asymmetric guesses (m <= 3).
  // Several positive roots can exist; the one with the least sum c_j^2 (the least action) is kept.
  double mu_mean = 0.0;
  for (double mu : rc.mu) mu_mean += mu / m;
  std::vector<std::vector<double>> starts{
      std::vector<double>(static_cast<std::size_t>(m), std::pow(mu_mean + rc.beta * (m - 1), -1.0 / (2.0 * p - 2.0)))};
  if (m <= 3) {
    const std::vector<double> levels{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    while (true) {
      std::vector<double> c(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) c[j] = levels[idx[j]] * std::pow(rc.mu[j], -1.0 / (2.0 * p - 2.0));
      starts.push_back(std::move(c));
      int j = 0;
      while (j < m && ++idx[j] == levels.size()) idx[j++] = 0;
      if (j == m) break;
    }
  }
  std::optional<std::vector<double>> best;
  const auto weight = [](const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x * x;
    return t;
  };
  for (const auto& start : starts) {
    auto root = newton(start);
    if (root && (!best || weight(*root) < weight(*best) - 1e-12)) best = std::move(root);
  }
  if (!best) {
    std::ostringstream os;
    os << "no positive amplitude solution found from " << starts.size() << " starting points";
    throw DomainError(os.str());
  }
  const auto& c = *best;
  sol.c = c;
  sol.residual = residual_of(c);
  return sol;
}

RadialField vector_from_amplitudes(const std::vector<double>& c, const RadialField& w) {
  if (w.components() != 1) throw GridMismatch("w must be a single-component profile");
  RadialField out(w.grid_ptr(), static_cast<int>(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) {
    auto dst = out[static_cast<int>(j)];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = c[j] * w[0][i];
  }
  return out;
}

std::vector<double> dilation_action_curve(const FieldMoments& m, const std::vector<double>& t_values) {
  const double n = m.dimension;
  const double pot = potential(m);
  std::vector<double> g;
  g.reserve(t_values.size());
  for (double t : t_values) {
    if (!(t > 0.0)) throw ValidationError(ValidationKind::options, "dilation parameter t must be > 0");
    g.push_back(0.5 * std::pow(t, n - 4.0) * m.kinetic + std::pow(t, n) * (0.5 * m.l2 - pot));
  }
  return g;
}

DilationMax dilation_action_max(const FieldMoments& m) {
  const double n = m.dimension;
  const double excess = 2.0 * potential(m) - m.l2;
  if (!(excess > 0.0)) {
    throw DomainError("dilation maximum needs 2P > sum ||phi_j||^2 (no potential excess)");
  }
  DilationMax r;
  if (m.dimension == 4) {
    r.supremum_at_origin = true;
    r.t_bar = 0.0;
    r.g_max = 0.5 * m.kinetic;
    // g decreases on (0, inf); the sampled supremum is its value at a tiny t.
    r.sampled_t = 1e-6;
    r.sampled_max = dilation_action_curve(m, {r.sampled_t})[0];
    r.relative_gap = std::abs(r.sampled_max - r.g_max) / r.g_max;
    return r;
  }
  r.t_bar = std::pow((n - 4.0) / n * m.kinetic / excess, 0.25);
  r.g_max = 2.0 / n * std::pow(r.t_bar, n - 4.0) * m.kinetic;

  // Golden-section search on [0, 4 t_bar]; g is unimodal there.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 4.0 * r.t_bar;
  auto g = [&](double t) { return t <= 0.0 ? 0.0 : dilation_action_curve(m, {t})[0]; };
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * r.t_bar; ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = g(x1);
    }
  }
  r.sampled_t = 0.5 * (lo + hi);
  r.sampled_max = g(r.sampled_t);
  r.relative_gap = std::abs(r.sampled_max - r.g_max) / std::abs(r.g_max);
  return r;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BCNLS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

BetaSweepReport classify_beta(const RadialGridPtr& grid, int dimension, double exponent,
                              const std::vector<double>& mu, const std::vector<double>& betas,
                              const PetviashviliOptions& opts, ValidationOptions validation) {
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (!(betas[i] > betas[i - 1])) throw ValidationError(ValidationKind::options, "beta values must increase");
  }
  BetaSweepReport report;
  report.dimension = dimension;
  report.exponent = exponent;
  report.mu = mu;
  const int m = static_cast<int>(mu.size());
  // Validates N, p and mu up front.
  make_params(dimension, exponent, {mu, 1.0}, validation);

  // Semi-trivial candidates are mu_j^{-1/(2p-2)} w with action mu_j^{-1/(p-1)} S(w).
  const auto w = solve_scalar_w(grid, dimension, exponent, opts, validation);
  const double scalar_action = w.action_level;
  int best_j = 0;
  for (int j = 1; j < m; ++j)
    if (mu[j] > mu[best_j]) best_j = j;
  const double semi_action = std::pow(mu[best_j], -1.0 / (exponent - 1.0)) * scalar_action;

  report.rows.resize(betas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < betas.size(); i = next++) {
      BetaSweepRow row;
      row.beta = betas[i];
      row.semi_trivial_action = semi_action;
      row.semi_trivial_component = best_j;
      if (m == 1) {
        row.classification = "semi-trivial";
        report.rows[i] = row;
        continue;
      }
      std::vector<std::string> notes;
      try {
        const auto params = make_params(dimension, exponent, {mu, betas[i]}, validation);
        try {
          const auto direct = solve_vector_direct(grid, params, opts);
          if (!direct.semi_trivial) {
            row.vector_action = direct.action_level;
            row.vector_source = "direct";
          } else {
            notes.push_back("direct solve is semi-trivial");
          }
        } catch (const ConvergenceError& e) {
          notes.push_back(std::string("direct: ") + e.what());
        }
        if (!row.vector_action) {
          try {
            const auto amp = solve_amplitudes({mu, betas[i]}, exponent);
            const auto cand = certify(vector_from_amplitudes(amp.c, w.profile), params);
            if (cand.residual_sup <= 1e3 * opts.tol) {
              row.vector_action = cand.action_level;
              row.vector_source = "amplitudes";
            }
          } catch (const DomainError& e) {
            notes.push_back(std::string("amplitudes: ") + e.what());
          }
        }
      } catch (const Error& e) {
        notes.push_back(e.what());
      }
      if (row.vector_action) {
        row.classification = *row.vector_action < semi_action ? "vector" : "semi-trivial";
      } else {
        row.classification = notes.empty() ? "semi-trivial" : "undetermined";
      }
      for (std::size_t k = 0; k < notes.size(); ++k) row.note += (k ? "; " : "") + notes[k];
      report.rows[i] = row;
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(std::max<std::size_t>(1, betas.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& a = report.rows[i - 1];
    const auto& b = report.rows[i];
    if (a.classification != "undetermined" && b.classification != "undetermined" &&
        a.classification != b.classification) {
      report.crossover = std::make_pair(a.beta, b.beta);
      break;
    }
  }
  return report;
}

}  // namespace bcnls
