#pragma once

#include <limits>
#include <vector>

#include "bcnls/error.hpp"

namespace bcnls {

/// Open exponent window (p_*, p^*) for the dimension. `upper` is +infinity for N = 4.
struct CriticalExponents {
  double lower;
  double upper;
};

CriticalExponents critical_exponents(int dimension);

/// Symmetric m x m coupling a_{jk}, stored row-major.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  CouplingMatrix(int size, std::vector<double> row_major);

  int size() const noexcept { return size_; }
  double operator()(int j, int k) const { return entries_[static_cast<std::size_t>(j * size_ + k)]; }
  const std::vector<double>& row_major() const noexcept { return entries_; }

  bool symmetric() const;
  bool operator==(const CouplingMatrix&) const = default;

 private:
  int size_ = 0;
  std::vector<double> entries_;
};

/// Diagonal mu_j, off-diagonal beta.
struct ReducedCoupling {
  std::vector<double> mu;
  double beta = 0.0;
};

/// `allow_decoupled` admits beta = 0 (the decoupled limit used by GN and sweep studies).
CouplingMatrix expand_coupling(const ReducedCoupling& rc, int components, bool allow_decoupled = false);

struct ProblemParams {
  int dimension = 0;
  int components = 0;
  double exponent = 0.0;
  CouplingMatrix coupling;
};

struct ValidationOptions {
  /// Admit 1 <= N < 4 and any p > 1 (exploratory and mass-critical runs).
  bool allow_out_of_range = false;
  /// Admit zero off-diagonal coupling entries (beta = 0 limit).
  bool allow_decoupled = false;
};

/// Parameters that passed `validate`; the only way to build one.
class ValidatedParams {
 public:
  const ProblemParams& raw() const noexcept { return params_; }
  int dimension() const noexcept { return params_.dimension; }
  int components() const noexcept { return params_.components; }
  double exponent() const noexcept { return params_.exponent; }
  double a(int j, int k) const { return params_.coupling(j, k); }
  const CouplingMatrix& coupling() const noexcept { return params_.coupling; }
  bool out_of_range() const noexcept { return out_of_range_; }
  const ValidationOptions& options() const noexcept { return options_; }

  /// N - p(N - 4), the mass exponent numerator that recurs in every Pohozaev relation.
  double pohozaev_denominator() const;

 private:
  friend ValidatedParams validate(const ProblemParams&, ValidationOptions);
  ValidatedParams(ProblemParams p, ValidationOptions o, bool out_of_range)
      : params_(std::move(p)), options_(o), out_of_range_(out_of_range) {}
  ProblemParams params_;
  ValidationOptions options_;
  bool out_of_range_ = false;
};

ValidatedParams validate(const ProblemParams& params, ValidationOptions options = {});

/// Convenience for the common reduced form.
ValidatedParams make_params(int dimension, double exponent, const ReducedCoupling& rc,
                            ValidationOptions options = {});

/// (alpha, beta) of the amplitude/dilation scaling family.
struct ScalingPair {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Throws ValidationError(invalid_pair) unless alpha, beta >= 0 and not both zero.
ScalingPair checked_pair(double alpha, double beta);

}  // namespace bcnls
