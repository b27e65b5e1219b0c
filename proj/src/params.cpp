#include "bcnls/params.hpp"

#include <cmath>
#include <sstream>

namespace bcnls {

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::dimension: return "dimension";
    case ValidationKind::components: return "components";
    case ValidationKind::exponent_range: return "exponent-range";
    case ValidationKind::coupling_shape: return "coupling-shape";
    case ValidationKind::coupling_symmetry: return "coupling-symmetry";
    case ValidationKind::coupling_positivity: return "coupling-positivity";
    case ValidationKind::invalid_pair: return "invalid-pair";
    case ValidationKind::options: return "options";
  }
  return "unknown";
}

CriticalExponents critical_exponents(int dimension) {
  if (dimension < 4) {
    throw ValidationError(ValidationKind::dimension, "critical exponents need N >= 4, got " +
                                                         std::to_string(dimension));
  }
  const double n = dimension;
  const double upper = dimension == 4 ? std::numeric_limits<double>::infinity() : n / (n - 4.0);
  return {1.0 + 4.0 / n, upper};
}

CouplingMatrix::CouplingMatrix(int size, std::vector<double> row_major)
    : size_(size), entries_(std::move(row_major)) {
  if (size < 0 || entries_.size() != static_cast<std::size_t>(size) * static_cast<std::size_t>(size)) {
    throw ValidationError(ValidationKind::coupling_shape,
                          "coupling matrix needs " + std::to_string(size * size) + " entries, got " +
                              std::to_string(entries_.size()));
  }
}

bool CouplingMatrix::symmetric() const {
  for (int j = 0; j < size_; ++j)
    for (int k = j + 1; k < size_; ++k)
      if ((*this)(j, k) != (*this)(k, j)) return false;
  return true;
}

CouplingMatrix expand_coupling(const ReducedCoupling& rc, int components, bool allow_decoupled) {
  if (components < 1) {
    throw ValidationError(ValidationKind::components, "need at least one component");
  }
  if (rc.mu.size() != static_cast<std::size_t>(components)) {
    throw ValidationError(ValidationKind::coupling_shape,
                          "expected " + std::to_string(components) + " values of mu, got " +
                              std::to_string(rc.mu.size()));
  }
  for (double mu : rc.mu) {
    if (!(mu > 0.0)) throw ValidationError(ValidationKind::coupling_positivity, "mu_j must be > 0");
  }
  // beta is irrelevant for a single component.
  if (components > 1 && !(rc.beta > 0.0) && !(allow_decoupled && rc.beta == 0.0)) {
    throw ValidationError(ValidationKind::coupling_positivity, "beta must be > 0");
  }
  std::vector<double> a(static_cast<std::size_t>(components * components), rc.beta);
  for (int j = 0; j < components; ++j) a[static_cast<std::size_t>(j * components + j)] = rc.mu[j];
  return CouplingMatrix(components, std::move(a));
}

double ValidatedParams::pohozaev_denominator() const {
  const double n = params_.dimension;
  return n - params_.exponent * (n - 4.0);
}

ValidatedParams validate(const ProblemParams& params, ValidationOptions options) {
  const int n = params.dimension;
  const double p = params.exponent;
  const int min_dim = options.allow_out_of_range ? 1 : 4;
  if (n < min_dim) {
    throw ValidationError(ValidationKind::dimension,
                          "N = " + std::to_string(n) + " below minimum " + std::to_string(min_dim));
  }
  if (params.components < 1) {
    throw ValidationError(ValidationKind::components, "need at least one component");
  }

  bool out_of_range = false;
  if (!std::isfinite(p) || !(p > 1.0)) {
    throw ValidationError(ValidationKind::exponent_range, "p must be a finite real > 1");
  }
  if (n >= 4) {
    const auto ce = critical_exponents(n);
    if (!(p > ce.lower && p < ce.upper)) {
      if (!options.allow_out_of_range) {
        std::ostringstream os;
        os.precision(17);
        os << "p = " << p << " outside (" << ce.lower << ", " << ce.upper << ")";
        throw ValidationError(ValidationKind::exponent_range, os.str());
      }
      out_of_range = true;
    }
  } else {
    out_of_range = true;
  }

  const auto& c = params.coupling;
  if (c.size() != params.components) {
    throw ValidationError(ValidationKind::coupling_shape,
                          "coupling is " + std::to_string(c.size()) + "x" + std::to_string(c.size()) +
                              " for " + std::to_string(params.components) + " components");
  }
  for (int j = 0; j < c.size(); ++j) {
    for (int k = 0; k < c.size(); ++k) {
      if (c(j, k) != c(k, j)) {
        throw ValidationError(ValidationKind::coupling_symmetry,
                              "a[" + std::to_string(j) + "][" + std::to_string(k) + "] != a[" +
                                  std::to_string(k) + "][" + std::to_string(j) + "]");
      }
    }
  }
  for (int j = 0; j < c.size(); ++j) {
    for (int k = 0; k < c.size(); ++k) {
      const double v = c(j, k);
      const bool zero_ok = options.allow_decoupled && j != k && v == 0.0;
      if (!std::isfinite(v) || (!(v > 0.0) && !zero_ok)) {
        throw ValidationError(ValidationKind::coupling_positivity, "coupling entries must be finite and > 0");
      }
    }
  }
  return ValidatedParams(params, options, out_of_range);
}

ValidatedParams make_params(int dimension, double exponent, const ReducedCoupling& rc,
                            ValidationOptions options) {
  const int m = static_cast<int>(rc.mu.size());
  return validate(ProblemParams{dimension, m, exponent, expand_coupling(rc, m, options.allow_decoupled)},
                  options);
}

ScalingPair checked_pair(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || (alpha == 0.0 && beta == 0.0)) {
    throw ValidationError(ValidationKind::invalid_pair, "scaling pair must lie in R+^2 \\ {(0,0)}");
  }
  return {alpha, beta};
}

}  // namespace bcnls
