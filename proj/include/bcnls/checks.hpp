#pragma once

#include <string>
#include <vector>

#include "bcnls/io.hpp"

namespace bcnls {

/// Outcome of one named check. `findings` lists documented discrepancies that the check
/// tolerates by construction (for example the closed-form GN constant).
struct CheckResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string summary;
  std::vector<std::string> findings;
  Json details;
  double seconds = 0.0;
};

Json to_json(const CheckResult& r);

/// "criterion-1" .. "criterion-10".
const std::vector<std::string>& preset_names();

/// Runs one acceptance preset with its frozen configuration. Throws ValidationError for unknown names.
CheckResult run_preset(const std::string& name);

/// Pohozaev, constraint, Lie-derivative, dilation and GN checks for the scalar problem at (N, p).
std::vector<CheckResult> invariant_suite(int dimension, double exponent, ValidationOptions options = {});

}  // namespace bcnls
