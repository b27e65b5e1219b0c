#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bcnls/functionals.hpp"
#include "bcnls/grid.hpp"
#include "bcnls/params.hpp"

namespace bcnls {

class SpectralTransform;

/// Time stepping for i u_t + Delta^2 u = F(u) on a periodic box.
///
/// Sign conventions. The free part i u_t + Delta^2 u = 0 has u_hat(t) = exp(+i |k|^4 t) u_hat(0).
/// The nonlinear part i u_t = theta(|u|) u keeps every modulus fixed, so it is the pointwise
/// rotation u_j <- exp(-i theta_j t) u_j with theta_j = sum_k a_jk |u_k|^p |u_j|^{p-2}.
/// A stationary profile Delta^2 Psi + Psi = F(Psi) therefore evolves as exp(-i t) Psi.
struct SimState {
  ComplexField field;
  double time = 0.0;
  long step_count = 0;
};

/// Strang, or the symmetric fourth-order composition of three Strang steps.
enum class Splitting { strang, yoshida4 };

/// Cached transforms and phase tables for one (grid, params) pair.
class SplitStepIntegrator {
 public:
  SplitStepIntegrator(PeriodicGridPtr grid, int components, const ValidatedParams& params);
  SplitStepIntegrator(SplitStepIntegrator&&) noexcept;
  SplitStepIntegrator& operator=(SplitStepIntegrator&&) noexcept;
  ~SplitStepIntegrator();

  /// Exact free flow over time t.
  void linear(SimState& s, double t) const;
  /// Exact nonlinear sub-flow over time t.
  void nonlinear(SimState& s, double t) const;
  /// One Strang step L(tau/2) N(tau) L(tau/2).
  void strang(SimState& s, double tau) const;
  /// `steps` steps of `scheme` with adjacent linear sub-steps merged. Negative tau runs backwards.
  void advance(SimState& s, double tau, long steps, Splitting scheme = Splitting::strang) const;

  const SpectralTransform& transform() const;
  const PeriodicGrid& grid() const { return *grid_; }
  const ValidatedParams& params() const { return params_; }

 private:
  struct Tables;
  PeriodicGridPtr grid_;
  ValidatedParams params_;
  std::unique_ptr<Tables> tables_;
  void check(const SimState& s) const;
  void apply_phase(SimState& s, double t) const;
};

const char* to_string(Splitting s);

SimState linear_halfstep(SimState state, double half_tau);
SimState nonlinear_step(SimState state, double tau, const ValidatedParams& params);
SimState strang_step(SimState state, double tau, const ValidatedParams& params);

enum class Membership { A_plus, A_minus, above_m };
const char* to_string(Membership m);

struct MonitorConfig {
  long sample_every = 1;
  std::vector<ScalingPair> pairs;
  std::optional<double> m_level;
  std::optional<double> gn_constant;
  /// Abort once the kinetic sum exceeds this value.
  std::optional<double> kinetic_ceiling;
  double tail_warn = 1e-8;
  double tail_abort = 1e-3;
  /// Called with the state at every sample (after monitors are recorded).
  std::function<void(const SimState&)> on_sample;
};

struct MassCriticalMargin {
  double total_mass = 0.0;
  double threshold = 0.0;   // (1 / (2C))^{N/4}
  double factor = 1.0;      // 1 - 2C M_tot^{4/N}
  double energy = 0.0;
  double ceiling = 0.0;     // 2E / factor, +inf when factor <= 0
  bool below_threshold = true;
};

struct TrajectoryReport {
  int components = 0;
  std::vector<ScalingPair> pairs;
  std::vector<double> times;
  std::vector<std::vector<double>> mass_series;    // [component][sample]
  std::vector<double> energy_series;
  std::vector<std::vector<double>> K_series;       // [pair][sample]
  std::vector<std::vector<double>> K_scale_series; // quadratic part of K, [pair][sample]
  std::vector<double> kinetic_series;
  std::vector<double> action_series;
  std::vector<std::vector<Membership>> membership_series;  // [pair][sample], empty without m_level
  std::vector<double> tail_series;
  std::optional<MassCriticalMargin> threshold_margin;
  bool aborted = false;
  std::string abort_reason;
  double last_reliable_time = 0.0;
  SimState final_state;

  std::size_t samples() const noexcept { return times.size(); }
};

/// Fixed-step splitting integration to time T with monitors every `sample_every` steps.
/// Throws ValidationError when tau does not divide T. Resolution loss, NaN and the kinetic
/// ceiling stop the run with `aborted` set and the last finite sample retained.
TrajectoryReport evolve(const ComplexField& init, double T, double tau, const ValidatedParams& params,
                        const MonitorConfig& monitors, Splitting scheme = Splitting::strang);

Membership stable_set_membership(const FieldMoments& moments, ScalingPair pair, double m_level);
Membership stable_set_membership(const ComplexField& u, const ValidatedParams& params, ScalingPair pair,
                                 double m_level);

struct KineticBoundCheck {
  bool pass = true;
  double max_kinetic = 0.0;
  double bound = 0.0;  // (2 + N) m / 2
};

KineticBoundCheck kinetic_bound_check(const TrajectoryReport& report, double m_level, int dimension,
                                      double tol = 1e-2);

/// Requires p = 1 + 4/N (DomainError otherwise).
MassCriticalMargin mass_critical_margin(const FieldMoments& moments, const ValidatedParams& params, double C);
MassCriticalMargin mass_critical_margin(const ComplexField& init, const ValidatedParams& params, double C);

struct PeriodicGroundState {
  ComplexField profile;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Petviashvili iteration for Delta^2 u + u = F(u) on the box, started from `init` (real part).
/// Used to polish transplanted radial profiles into exact discrete stationary states.
PeriodicGroundState periodic_ground_state(const ComplexField& init, const ValidatedParams& params,
                                          int max_iter = 2000, double tol = 1e-12);

/// Builtin initial data: amplitude * exp(-|x|^2 / (2 sigma^2)) in every component.
ComplexField gaussian_data(PeriodicGridPtr box, int components, double amplitude, double sigma = 1.0);

}  // namespace bcnls
