#include "bcnls/functionals.hpp"

#include <cmath>
#include <limits>

#include "bcnls/spectral.hpp"

namespace bcnls {
namespace {

constexpr double kRegularization = 1e-30;

// |x|^{p-2} x with the zero limit handled for p < 2.
double signed_pow(double x, double p) {
  if (p == 2.0) return x;
  if (p == 3.0) return std::abs(x) * x;
  if (p == 4.0) return x * x * x;
  return std::pow(std::max(std::abs(x), kRegularization), p - 2.0) * x;
}

void check_components(int have, const ValidatedParams& params) {
  if (have != params.components()) {
    throw GridMismatch("field has " + std::to_string(have) + " components, parameters expect " +
                       std::to_string(params.components()));
  }
}

// Pointwise sum_{j,k} a_jk |u_j|^p |u_k|^p given the moduli at one point.
template <class Modulus>
double interaction_density(const ValidatedParams& params, std::vector<double>& powers, Modulus modulus) {
  const int m = params.components();
  const double p = params.exponent();
  for (int j = 0; j < m; ++j) powers[static_cast<std::size_t>(j)] = abs_pow(modulus(j), p);
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    const double pj = powers[static_cast<std::size_t>(j)];
    if (pj == 0.0) continue;
    double row = params.a(j, j) * pj;
    for (int k = j + 1; k < m; ++k) row += 2.0 * params.a(j, k) * powers[static_cast<std::size_t>(k)];
    s += pj * row;
  }
  return s;
}

void finish(FieldMoments& m) {
  m.kinetic = 0.0;
  m.l2 = 0.0;
  for (double v : m.kinetic_per_component) m.kinetic += v;
  for (double v : m.mass_per_component) m.l2 += v;
}

}  // namespace

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) return (a * a) * (a * a);
  if (p == 1.0) return a;
  if (p == 6.0) {
    const double a3 = a * a * a;
    return a3 * a3;
  }
  return std::pow(a, p);
}

FieldMoments compute_moments(const RadialField& u, const ValidatedParams& params) {
  check_components(u.components(), params);
  const auto& g = u.grid();
  if (g.dimension() != params.dimension()) throw GridMismatch("grid dimension differs from parameters");
  const auto& w = g.weights();
  const int m = u.components();
  FieldMoments out;
  out.dimension = params.dimension();
  out.exponent = params.exponent();
  out.kinetic_per_component.assign(static_cast<std::size_t>(m), 0.0);
  out.mass_per_component.assign(static_cast<std::size_t>(m), 0.0);
  std::vector<double> lap(static_cast<std::size_t>(g.size()));
  for (int j = 0; j < m; ++j) {
    radial_laplacian(g, u[j], lap);
    double kin = 0.0, mass = 0.0;
    auto c = u[j];
    for (std::size_t i = 0; i < lap.size(); ++i) {
      kin += w[i] * lap[i] * lap[i];
      mass += w[i] * c[i] * c[i];
    }
    out.kinetic_per_component[static_cast<std::size_t>(j)] = kin;
    out.mass_per_component[static_cast<std::size_t>(j)] = mass;
  }
  std::vector<double> powers(static_cast<std::size_t>(m));
  double q = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    q += w[static_cast<std::size_t>(i)] *
         interaction_density(params, powers, [&](int j) { return u[j][static_cast<std::size_t>(i)]; });
  }
  out.interaction = q;
  finish(out);
  return out;
}

FieldMoments compute_moments(const ComplexField& u, const ValidatedParams& params, const SpectralTransform* fft) {
  check_components(u.components(), params);
  const auto& g = u.grid();
  if (g.dims() != params.dimension()) throw GridMismatch("box dimension differs from parameters");
  const int m = u.components();
  const std::size_t n = u.points();
  const double dv = g.cell_volume();
  FieldMoments out;
  out.dimension = params.dimension();
  out.exponent = params.exponent();
  out.kinetic_per_component.assign(static_cast<std::size_t>(m), 0.0);
  out.mass_per_component.assign(static_cast<std::size_t>(m), 0.0);

  std::optional<SpectralTransform> own;
  if (!fft) fft = &own.emplace(g, m);
  std::vector<std::complex<double>> spec = u.values();
  fft->forward(spec);
  const auto symbol = bilaplacian_symbol(g);
  for (int j = 0; j < m; ++j) {
    double kin = 0.0, mass = 0.0;
    const auto* s = spec.data() + static_cast<std::size_t>(j) * n;
    auto c = u[j];
    for (std::size_t i = 0; i < n; ++i) {
      kin += symbol[i] * std::norm(s[i]);
      mass += std::norm(c[i]);
    }
    out.kinetic_per_component[static_cast<std::size_t>(j)] = kin * dv / static_cast<double>(n);
    out.mass_per_component[static_cast<std::size_t>(j)] = mass * dv;
  }
  std::vector<double> powers(static_cast<std::size_t>(m));
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q += interaction_density(params, powers, [&](int j) { return std::abs(u[j][i]); });
  }
  out.interaction = q * dv;
  finish(out);
  return out;
}

double potential(const FieldMoments& m) { return m.interaction / (2.0 * m.exponent); }

double energy(const FieldMoments& m) { return 0.5 * m.kinetic - potential(m); }

double action(const FieldMoments& m) { return energy(m) + 0.5 * m.l2; }

double constraint_quadratic_part(const FieldMoments& m, ScalingPair pair) {
  const double n = m.dimension;
  return 0.5 * ((2.0 * pair.alpha + (n - 4.0) * pair.beta) * m.kinetic + (2.0 * pair.alpha + n * pair.beta) * m.l2);
}

double constraint_K(const FieldMoments& m, ScalingPair pair) {
  const double n = m.dimension;
  const double p = m.exponent;
  return constraint_quadratic_part(m, pair) - (2.0 * p * pair.alpha + n * pair.beta) / (2.0 * p) * m.interaction;
}

double functional_H(const FieldMoments& m, ScalingPair pair) {
  const double denom = 2.0 * pair.alpha + m.dimension * pair.beta;
  if (denom == 0.0) throw DomainError("H is undefined when 2 alpha + N beta = 0");
  const double p = m.exponent;
  return (2.0 * pair.beta * m.kinetic + pair.alpha * (1.0 - 1.0 / p) * m.interaction) / denom;
}

double gn_quotient(const FieldMoments& m) {
  const double pot = potential(m);
  if (!(pot > 0.0)) throw DomainError("J is undefined when P(u) <= 0");
  const double n = m.dimension;
  const double p = m.exponent;
  return std::pow(m.kinetic, (p - 1.0) * n / 4.0) * std::pow(m.l2, (n - p * (n - 4.0)) / 4.0) / pot;
}

double potential(const RadialField& u, const ValidatedParams& params) {
  return potential(compute_moments(u, params));
}
double energy(const RadialField& u, const ValidatedParams& params) { return energy(compute_moments(u, params)); }
double action(const RadialField& u, const ValidatedParams& params) { return action(compute_moments(u, params)); }
double constraint_K(const RadialField& u, const ValidatedParams& params, ScalingPair pair) {
  return constraint_K(compute_moments(u, params), checked_pair(pair.alpha, pair.beta));
}
double functional_H(const RadialField& u, const ValidatedParams& params, ScalingPair pair) {
  return functional_H(compute_moments(u, params), pair);
}
double gn_quotient(const RadialField& u, const ValidatedParams& params) {
  return gn_quotient(compute_moments(u, params));
}

RadialField nonlinearity(const RadialField& u, const ValidatedParams& params) {
  check_components(u.components(), params);
  const int m = u.components();
  const double p = params.exponent();
  RadialField out(u.grid_ptr(), m);
  std::vector<double> powers(static_cast<std::size_t>(m));
  for (int i = 0; i < u.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    for (int k = 0; k < m; ++k) powers[static_cast<std::size_t>(k)] = abs_pow(u[k][idx], p);
    for (int j = 0; j < m; ++j) {
      const double x = u[j][idx];
      if (x == 0.0) continue;
      double theta = 0.0;
      for (int k = 0; k < m; ++k) theta += params.a(j, k) * powers[static_cast<std::size_t>(k)];
      out[j][idx] = theta * signed_pow(x, p);
    }
  }
  return out;
}

ElResidual el_residual(const RadialField& u, const ValidatedParams& params, double a, double b,
                       double rhs_scale) {
  const auto f = nonlinearity(u, params);
  const auto& g = u.grid();
  ElResidual out{RadialField(u.grid_ptr(), u.components()), 0.0, 0.0};
  RadialBiharmonicSolver solver(u.grid_ptr(), a, b);
  std::vector<double> pre(static_cast<std::size_t>(g.size()));
  for (int j = 0; j < u.components(); ++j) {
    const auto bil = radial_bilaplacian(g, u[j]);
    auto r = out.residual[j];
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = a * bil[i] + b * u[j][i] - rhs_scale * f[j][i];
      out.raw_sup = std::max(out.raw_sup, std::abs(r[i]));
    }
    // Preconditioned form avoids re-applying Delta^2 to roundoff.
    std::vector<double> scaled(f[j].begin(), f[j].end());
    for (double& v : scaled) v *= rhs_scale;
    solver.solve(scaled, pre);
    for (std::size_t i = 0; i < r.size(); ++i) out.weighted_sup = std::max(out.weighted_sup, std::abs(u[j][i] - pre[i]));
  }
  return out;
}

FunctionalReport functional_report(const FieldMoments& m, std::optional<ScalingPair> pair) {
  FunctionalReport r;
  r.mass = m.mass_per_component;
  r.kinetic = m.kinetic;
  r.l2 = m.l2;
  r.potential = potential(m);
  r.energy = energy(m);
  r.action = action(m);
  if (pair) {
    r.pair = pair;
    r.K = constraint_K(m, *pair);
    r.H = functional_H(m, *pair);
  }
  if (r.potential > 0.0) r.J = gn_quotient(m);
  return r;
}

std::vector<std::string> functional_report_columns(int components) {
  std::vector<std::string> cols;
  for (int j = 1; j <= components; ++j) cols.push_back("mass_" + std::to_string(j));
  for (const char* c : {"kinetic", "l2", "potential", "energy", "action", "K_alpha_beta", "H_alpha_beta", "J"}) {
    cols.emplace_back(c);
  }
  return cols;
}

std::vector<double> functional_report_values(const FunctionalReport& r) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v = r.mass;
  v.insert(v.end(), {r.kinetic, r.l2, r.potential, r.energy, r.action, r.K.value_or(nan), r.H.value_or(nan),
                     r.J.value_or(nan)});
  return v;
}

RadialField scaling_flow(const RadialField& u, ScalingPair pair, double lambda, ScalingMode mode,
                         RescaleReport* report) {
  const double amplitude = std::exp(pair.alpha * lambda);
  if (mode == ScalingMode::transport) {
    RadialField out = u.on_grid(u.grid().dilated(std::exp(pair.beta * lambda)));
    out *= amplitude;
    if (report) *report = {};
    return out;
  }
  return rescale_field(u, amplitude, std::exp(-pair.beta * lambda), report);
}

LieDerivativeReport lie_derivative_check(const RadialField& u, const ValidatedParams& params, ScalingPair pair,
                                         const std::vector<double>& lambdas, ScalingMode mode) {
  pair = checked_pair(pair.alpha, pair.beta);
  const auto m = compute_moments(u, params);
  LieDerivativeReport out;
  out.K = constraint_K(m, pair);
  out.action = action(m);
  for (double lambda : lambdas) {
    const double plus = action(scaling_flow(u, pair, lambda, mode), params);
    const double minus = action(scaling_flow(u, pair, -lambda, mode), params);
    const double fd = (plus - minus) / (2.0 * lambda);
    out.samples.push_back({lambda, fd, std::abs(fd - out.K)});
  }
  // Least-squares slope in log-log coordinates.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool zero = out.samples.size() < 2;
  for (const auto& s : out.samples) {
    if (!(s.error > 0.0)) zero = true;
    const double x = std::log(s.lambda), y = std::log(s.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(out.samples.size());
  out.observed_order = zero ? std::numeric_limits<double>::quiet_NaN() : (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

}  // namespace bcnls
