#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bcnls/dynamics.hpp"
#include "bcnls/gn.hpp"
#include "bcnls/groundstate.hpp"

namespace bcnls {

using Json = nlohmann::json;

/// Failure reading or writing a file; the message names the path.
class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : Error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------------------------
// Snapshots
//
// "BCNLS1", then little-endian u32 kind (0 radial-real, 1 periodic-complex), u32 N or d, u32 m,
// u32 n per dimension, f64 R or L, f64 time, then the f64 payload (re/im interleaved for kind 1).

enum class SnapshotKind : std::uint32_t { radial_real = 0, periodic_complex = 1 };

struct Snapshot {
  double time = 0.0;
  std::variant<RadialField, ComplexField> field;

  SnapshotKind kind() const noexcept {
    return field.index() == 0 ? SnapshotKind::radial_real : SnapshotKind::periodic_complex;
  }
};

void write_snapshot(const std::filesystem::path& path, const RadialField& field, double time = 0.0);
void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double time);
Snapshot read_snapshot(const std::filesystem::path& path);

// ---------------------------------------------------------------------------------------------
// Configuration

/// Required keys dimension, components, exponent and either coupling_matrix (row-major) or mu + beta.
/// Optional booleans allow_out_of_range and allow_decoupled override `options`.
ValidatedParams params_from_json(const Json& config, ValidationOptions options = {});
Json params_to_json(const ValidatedParams& params);
Json read_json_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------------------------
// Reports

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// version, config echo, seed and grid fingerprints (hex). No timestamps.
Json provenance(const Json& config, std::uint64_t seed, const std::vector<std::pair<std::string, std::uint64_t>>& grids);

Json to_json(const FunctionalReport& r);
CsvTable functional_csv(const FunctionalReport& r);

Json to_json(const GroundStateResult& r);
Json to_json(const BetaSweepReport& r);
/// One row per beta with a classification column.
CsvTable beta_sweep_csv(const BetaSweepReport& r);

Json to_json(const GNResult& r);
Json to_json(const CrossValidation& r);
Json to_json(const InequalityReport& r);

/// Summary (final values, abort state, margins); the series go to the CSV.
Json to_json(const TrajectoryReport& r);
/// t, mass_j, energy, kinetic, action, tail, then K, K_scale and membership per pair.
/// Header only when there are no samples.
CsvTable trajectory_csv(const TrajectoryReport& r);

}  // namespace bcnls
