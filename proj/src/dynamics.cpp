#include "bcnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bcnls/diagnostics.hpp"
#include "bcnls/spectral.hpp"

namespace bcnls {
namespace {

constexpr double kRegularization = 1e-30;

void check_field(const ComplexField& f, const ValidatedParams& params) {
  if (f.components() != params.components()) {
    throw GridMismatch("field has " + std::to_string(f.components()) + " components, parameters " +
                       std::to_string(params.components()));
  }
  if (f.grid().dims() != params.dimension()) throw GridMismatch("box dimension differs from parameters");
}

double spectral_tail(const ComplexField& u, const SpectralTransform& fft) {
  std::vector<std::complex<double>> spec = u.values();
  fft.forward(spec);
  double tail = 0.0;
  for (int j = 0; j < u.components(); ++j) {
    std::span<const std::complex<double>> block(spec.data() + static_cast<std::size_t>(j) * u.points(), u.points());
    tail = std::max(tail, nyquist_fraction(u.grid(), block));
  }
  return tail;
}

}  // namespace

struct SplitStepIntegrator::Tables {
  SpectralTransform fft;
  std::vector<double> symbol;
  std::vector<std::pair<double, std::vector<std::complex<double>>>> phases;
};

SplitStepIntegrator::SplitStepIntegrator(PeriodicGridPtr grid, int components, const ValidatedParams& params)
    : grid_(std::move(grid)), params_(params) {
  if (components != params_.components()) throw GridMismatch("component count differs from parameters");
  if (grid_->dims() != params_.dimension()) throw GridMismatch("box dimension differs from parameters");
  tables_ = std::make_unique<Tables>(Tables{SpectralTransform(*grid_, components), bilaplacian_symbol(*grid_), {}});
}

SplitStepIntegrator::SplitStepIntegrator(SplitStepIntegrator&&) noexcept = default;
SplitStepIntegrator& SplitStepIntegrator::operator=(SplitStepIntegrator&&) noexcept = default;
SplitStepIntegrator::~SplitStepIntegrator() = default;

const SpectralTransform& SplitStepIntegrator::transform() const { return tables_->fft; }

void SplitStepIntegrator::check(const SimState& s) const {
  if (!s.field.grid().same_as(*grid_) || s.field.components() != params_.components()) {
    throw GridMismatch("state does not match the integrator grid");
  }
}

void SplitStepIntegrator::apply_phase(SimState& s, double t) const {
  auto& tab = *tables_;
  auto it = std::find_if(tab.phases.begin(), tab.phases.end(), [t](const auto& e) { return e.first == t; });
  if (it == tab.phases.end()) {
    if (tab.phases.size() >= 4) tab.phases.erase(tab.phases.begin());
    std::vector<std::complex<double>> phase(tab.symbol.size());
    for (std::size_t i = 0; i < phase.size(); ++i) phase[i] = std::polar(1.0, tab.symbol[i] * t);
    tab.phases.emplace_back(t, std::move(phase));
    it = std::prev(tab.phases.end());
  }
  const auto& phase = it->second;
  auto& v = s.field.values();
  tab.fft.forward(v);
  const std::size_t n = s.field.points();
  for (int j = 0; j < s.field.components(); ++j) {
    auto* block = v.data() + static_cast<std::size_t>(j) * n;
    for (std::size_t i = 0; i < n; ++i) block[i] *= phase[i];
  }
  tab.fft.backward(v);
}

void SplitStepIntegrator::linear(SimState& s, double t) const {
  check(s);
  if (t == 0.0) return;
  apply_phase(s, t);
}

void SplitStepIntegrator::nonlinear(SimState& s, double t) const {
  check(s);
  if (t == 0.0) return;
  const int m = s.field.components();
  const double p = params_.exponent();
  const std::size_t n = s.field.points();
  std::vector<double> mod(static_cast<std::size_t>(m)), modp(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      mod[j] = std::abs(s.field[j][i]);
      modp[j] = abs_pow(mod[j], p);
    }
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += params_.a(j, k) * modp[k];
      const double theta = sum * abs_pow(std::max(mod[j], kRegularization), p - 2.0);
      s.field[j][i] *= std::polar(1.0, -theta * t);
    }
  }
}

void SplitStepIntegrator::strang(SimState& s, double tau) const { advance(s, tau, 1); }

namespace {
std::vector<double> splitting_weights(Splitting scheme) {
  if (scheme == Splitting::strang) return {1.0};
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  return {w1, 1.0 - 2.0 * w1, w1};
}
}  // namespace

void SplitStepIntegrator::advance(SimState& s, double tau, long steps, Splitting scheme) const {
  if (!std::isfinite(tau)) throw ValidationError(ValidationKind::options, "time step must be finite");
  if (steps <= 0 || tau == 0.0) return;
  // Composition of Strang steps with weights c_i; adjacent linear half-steps are merged.
  const auto c = splitting_weights(scheme);
  const std::size_t q = c.size();
  linear(s, 0.5 * c.front() * tau);
  for (long k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < q; ++i) {
      nonlinear(s, c[i] * tau);
      const double next = i + 1 < q ? c[i + 1] : (k + 1 < steps ? c.front() : 0.0);
      linear(s, 0.5 * (c[i] + next) * tau);
    }
    ++s.step_count;
  }
  s.time += static_cast<double>(steps) * tau;
}

SimState linear_halfstep(SimState state, double half_tau) {
  if (half_tau == 0.0) return state;
  const auto& g = state.field.grid();
  const SpectralTransform fft(g, state.field.components());
  const auto symbol = bilaplacian_symbol(g);
  auto& v = state.field.values();
  fft.forward(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, symbol[i % symbol.size()] * half_tau);
  fft.backward(v);
  return state;
}

SimState nonlinear_step(SimState state, double tau, const ValidatedParams& params) {
  check_field(state.field, params);
  SplitStepIntegrator(state.field.grid_ptr(), state.field.components(), params).nonlinear(state, tau);
  return state;
}

SimState strang_step(SimState state, double tau, const ValidatedParams& params) {
  check_field(state.field, params);
  SplitStepIntegrator(state.field.grid_ptr(), state.field.components(), params).strang(state, tau);
  return state;
}

const char* to_string(Splitting s) { return s == Splitting::strang ? "strang" : "yoshida4"; }

const char* to_string(Membership m) {
  switch (m) {
    case Membership::A_plus: return "A_plus";
    case Membership::A_minus: return "A_minus";
    case Membership::above_m: return "above_m";
  }
  return "unknown";
}

Membership stable_set_membership(const FieldMoments& moments, ScalingPair pair, double m_level) {
  if (!(m_level > 0.0)) throw ValidationError(ValidationKind::options, "m_level must be > 0");
  if (action(moments) >= m_level) return Membership::above_m;
  return constraint_K(moments, pair) >= 0.0 ? Membership::A_plus : Membership::A_minus;
}

Membership stable_set_membership(const ComplexField& u, const ValidatedParams& params, ScalingPair pair,
                                 double m_level) {
  return stable_set_membership(compute_moments(u, params), pair, m_level);
}

KineticBoundCheck kinetic_bound_check(const TrajectoryReport& report, double m_level, int dimension, double tol) {
  KineticBoundCheck out;
  out.bound = (2.0 + dimension) * m_level / 2.0;
  for (double k : report.kinetic_series) out.max_kinetic = std::max(out.max_kinetic, k);
  out.pass = out.max_kinetic <= out.bound * (1.0 + tol);
  return out;
}

MassCriticalMargin mass_critical_margin(const FieldMoments& moments, const ValidatedParams& params, double C) {
  const double n = params.dimension();
  const double p_star = 1.0 + 4.0 / n;
  if (std::abs(params.exponent() - p_star) > 1e-12 * p_star) {
    std::ostringstream os;
    os.precision(17);
    os << "mass-critical margin needs p = 1 + 4/N = " << p_star << ", got " << params.exponent();
    throw DomainError(os.str());
  }
  if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError(ValidationKind::options, "GN constant must be > 0");
  MassCriticalMargin out;
  out.total_mass = moments.l2;
  out.threshold = std::pow(1.0 / (2.0 * C), n / 4.0);
  out.factor = 1.0 - 2.0 * C * std::pow(out.total_mass, 4.0 / n);
  out.energy = energy(moments);
  out.below_threshold = out.factor > 0.0;
  out.ceiling = out.below_threshold ? 2.0 * out.energy / out.factor : std::numeric_limits<double>::infinity();
  return out;
}

MassCriticalMargin mass_critical_margin(const ComplexField& init, const ValidatedParams& params, double C) {
  return mass_critical_margin(compute_moments(init, params), params, C);
}

TrajectoryReport evolve(const ComplexField& init, double T, double tau, const ValidatedParams& params,
                        const MonitorConfig& monitors, Splitting scheme) {
  check_field(init, params);
  if (!(tau > 0.0) || !(T >= 0.0) || !std::isfinite(T)) {
    throw ValidationError(ValidationKind::options, "need tau > 0 and finite T >= 0");
  }
  if (monitors.sample_every < 1) throw ValidationError(ValidationKind::options, "sample_every must be >= 1");
  const long steps = std::lround(T / tau);
  if (std::abs(static_cast<double>(steps) * tau - T) > 1e-9 * std::max(T, tau)) {
    throw ValidationError(ValidationKind::options, "tau does not divide T");
  }
  if (!init.all_finite()) throw ValidationError(ValidationKind::options, "initial data has non-finite entries");

  SplitStepIntegrator integ(init.grid_ptr(), init.components(), params);
  const int m = init.components();
  TrajectoryReport rep;
  rep.components = m;
  rep.pairs = monitors.pairs;
  rep.mass_series.resize(static_cast<std::size_t>(m));
  rep.K_series.resize(monitors.pairs.size());
  rep.K_scale_series.resize(monitors.pairs.size());
  if (monitors.m_level) rep.membership_series.resize(monitors.pairs.size());

  SimState state{init, 0.0, 0};
  const auto record = [&](const SimState& s) {
    const auto mom = compute_moments(s.field, params, &integ.transform());
    rep.times.push_back(s.time);
    for (int j = 0; j < m; ++j) rep.mass_series[j].push_back(mom.mass_per_component[j]);
    rep.energy_series.push_back(energy(mom));
    rep.action_series.push_back(action(mom));
    rep.kinetic_series.push_back(mom.kinetic);
    for (std::size_t q = 0; q < monitors.pairs.size(); ++q) {
      rep.K_series[q].push_back(constraint_K(mom, monitors.pairs[q]));
      rep.K_scale_series[q].push_back(constraint_quadratic_part(mom, monitors.pairs[q]));
      if (monitors.m_level) {
        rep.membership_series[q].push_back(stable_set_membership(mom, monitors.pairs[q], *monitors.m_level));
      }
    }
    rep.tail_series.push_back(spectral_tail(s.field, integ.transform()));
    if (monitors.on_sample) monitors.on_sample(s);
    return mom;
  };

  const auto initial = record(state);
  if (rep.tail_series.front() > monitors.tail_warn) {
    std::ostringstream os;
    os << "initial data not resolved: spectral tail " << rep.tail_series.front() << " of peak";
    warn(os.str());
  }
  if (monitors.gn_constant) rep.threshold_margin = mass_critical_margin(initial, params, *monitors.gn_constant);

  SimState last_good = state;
  long done = 0;
  while (done < steps) {
    const long chunk = std::min(monitors.sample_every, steps - done);
    integ.advance(state, tau, chunk, scheme);
    done += chunk;
    state.time = static_cast<double>(done) * tau;
    if (!state.field.all_finite()) {
      rep.aborted = true;
      rep.abort_reason = "non-finite values";
      break;
    }
    record(state);
    std::ostringstream os;
    if (rep.tail_series.back() > monitors.tail_abort) {
      os << "resolution lost: spectral tail " << rep.tail_series.back() << " of peak";
    } else if (monitors.kinetic_ceiling && rep.kinetic_series.back() > *monitors.kinetic_ceiling) {
      os << "kinetic sum " << rep.kinetic_series.back() << " above ceiling " << *monitors.kinetic_ceiling;
    }
    if (!os.str().empty()) {
      rep.aborted = true;
      rep.abort_reason = os.str();
      break;
    }
    last_good = state;
  }
  rep.last_reliable_time = last_good.time;
  rep.final_state = rep.aborted ? std::move(last_good) : std::move(state);
  return rep;
}

PeriodicGroundState periodic_ground_state(const ComplexField& init, const ValidatedParams& params, int max_iter,
                                          double tol) {
  check_field(init, params);
  const auto& g = init.grid();
  const int m = init.components();
  const std::size_t n = init.points();
  const double p = params.exponent();
  const double gamma = (2.0 * p - 1.0) / (2.0 * p - 2.0);
  SpectralTransform fft(g, m);
  auto op = bilaplacian_symbol(g);
  for (auto& v : op) v += 1.0;

  std::vector<double> u(static_cast<std::size_t>(m) * n);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = init.values()[i].real();
  std::vector<std::complex<double>> uh(u.size()), fh(u.size());
  std::vector<double> mod(static_cast<std::size_t>(m)), modp(static_cast<std::size_t>(m));

  PeriodicGroundState out;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        mod[j] = std::abs(u[j * n + i]);
        modp[j] = abs_pow(mod[j], p);
      }
      for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (int k = 0; k < m; ++k) sum += params.a(j, k) * modp[k];
        const double x = u[j * n + i];
        fh[j * n + i] = sum * abs_pow(std::max(mod[j], kRegularization), p - 2.0) * x;
        uh[j * n + i] = x;
      }
    }
    fft.forward(uh);
    fft.forward(fh);
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto a = uh[j * n + i];
        lhs += op[i] * std::norm(a);
        rhs += (fh[j * n + i] * std::conj(a)).real();
      }
    }
    if (!(rhs > 0.0)) throw ConvergenceError("periodic ground state collapsed to zero", it, 0.0);
    const double M = lhs / rhs;
    const double scale = std::pow(M, gamma);
    for (int j = 0; j < m; ++j)
      for (std::size_t i = 0; i < n; ++i) fh[j * n + i] *= scale / op[i];
    fft.backward(fh);
    double diff = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      diff = std::max(diff, std::abs(fh[i].real() - u[i]));
      u[i] = fh[i].real();
      peak = std::max(peak, std::abs(u[i]));
    }
    out.iterations = it;
    out.residual = diff / std::max(peak, 1e-300);
    if (out.residual <= tol && std::abs(M - 1.0) <= tol) {
      out.converged = true;
      break;
    }
  }
  std::vector<std::complex<double>> vals(u.begin(), u.end());
  out.profile = ComplexField(init.grid_ptr(), m, std::move(vals));
  return out;
}

ComplexField gaussian_data(PeriodicGridPtr box, int components, double amplitude, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError(ValidationKind::options, "Gaussian width must be > 0");
  return ComplexField::sample(std::move(box), components, [=](int, std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return std::complex<double>(amplitude * std::exp(-0.5 * r2 / (sigma * sigma)), 0.0);
  });
}

}  // namespace bcnls
