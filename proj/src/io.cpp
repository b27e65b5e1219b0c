#include "bcnls/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bcnls {

namespace {

constexpr char kMagic[6] = {'B', 'C', 'N', 'L', 'S', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError(path, "truncated snapshot");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw IoError(path, "cannot open for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError(path, "write failed");
}

void write_header(std::ostream& os, SnapshotKind kind, std::uint32_t dim, std::uint32_t m, std::uint32_t n,
                  double extent, double time) {
  os.write(kMagic, sizeof(kMagic));
  put_le(os, static_cast<std::uint32_t>(kind));
  put_le(os, dim);
  put_le(os, m);
  put_le(os, n);
  put_le(os, extent);
  put_le(os, time);
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json num(const std::optional<double>& x) { return x ? num(*x) : Json(nullptr); }

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string pair_tag(ScalingPair p) { return format_double(p.alpha) + "_" + format_double(p.beta); }

Json pair_json(ScalingPair p) { return Json::array({p.alpha, p.beta}); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Snapshots

void write_snapshot(const std::filesystem::path& path, const RadialField& field, double time) {
  const auto& g = field.grid();
  auto os = open_out(path, std::ios::binary);
  write_header(os, SnapshotKind::radial_real, static_cast<std::uint32_t>(g.dimension()),
               static_cast<std::uint32_t>(field.components()), static_cast<std::uint32_t>(g.size()), g.radius(), time);
  for (double v : field.values()) put_le(os, v);
  finish(os, path);
}

void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double time) {
  const auto& g = field.grid();
  auto os = open_out(path, std::ios::binary);
  write_header(os, SnapshotKind::periodic_complex, static_cast<std::uint32_t>(g.dims()),
               static_cast<std::uint32_t>(field.components()), static_cast<std::uint32_t>(g.points_per_dim()),
               g.half_period(), time);
  for (auto v : field.values()) {
    put_le(os, v.real());
    put_le(os, v.imag());
  }
  finish(os, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path, "cannot open for reading");
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path, "not a BCNLS1 snapshot");
  }
  const auto kind = get_le<std::uint32_t>(is, path);
  const auto dim = get_le<std::uint32_t>(is, path);
  const auto m = get_le<std::uint32_t>(is, path);
  const auto n = get_le<std::uint32_t>(is, path);
  const auto extent = get_le<double>(is, path);
  Snapshot snap;
  snap.time = get_le<double>(is, path);
  if (m == 0 || n == 0 || dim == 0) throw IoError(path, "empty snapshot header");

  if (kind == static_cast<std::uint32_t>(SnapshotKind::radial_real)) {
    auto grid = RadialGrid::make(static_cast<int>(dim), extent, static_cast<int>(n));
    std::vector<double> values(static_cast<std::size_t>(m) * n);
    for (auto& v : values) v = get_le<double>(is, path);
    snap.field = RadialField(grid, static_cast<int>(m), std::move(values));
  } else if (kind == static_cast<std::uint32_t>(SnapshotKind::periodic_complex)) {
    auto grid = PeriodicGrid::make(static_cast<int>(dim), static_cast<int>(n), extent);
    std::vector<std::complex<double>> values(static_cast<std::size_t>(m) * grid->total_points());
    for (auto& v : values) {
      const double re = get_le<double>(is, path);
      const double im = get_le<double>(is, path);
      v = {re, im};
    }
    snap.field = ComplexField(grid, static_cast<int>(m), std::move(values));
  } else {
    throw IoError(path, "unknown snapshot kind " + std::to_string(kind));
  }
  if (is.peek() != std::char_traits<char>::eof()) throw IoError(path, "trailing bytes after payload");
  return snap;
}

// ---------------------------------------------------------------------------------------------
// Configuration

ValidatedParams params_from_json(const Json& config, ValidationOptions options) {
  auto require = [&](const char* key) -> const Json& {
    if (!config.contains(key)) throw ValidationError(ValidationKind::options, std::string("missing key '") + key + "'");
    return config.at(key);
  };
  try {
    if (config.contains("allow_out_of_range")) options.allow_out_of_range = config.at("allow_out_of_range").get<bool>();
    if (config.contains("allow_decoupled")) options.allow_decoupled = config.at("allow_decoupled").get<bool>();
    const int n = require("dimension").get<int>();
    const int m = require("components").get<int>();
    const double p = require("exponent").get<double>();
    const bool has_matrix = config.contains("coupling_matrix");
    const bool has_reduced = config.contains("mu") || config.contains("beta");
    if (has_matrix == has_reduced) {
      throw ValidationError(ValidationKind::options, "give exactly one of coupling_matrix or mu + beta");
    }
    CouplingMatrix coupling;
    if (has_matrix) {
      coupling = CouplingMatrix(m, config.at("coupling_matrix").get<std::vector<double>>());
    } else {
      ReducedCoupling rc{require("mu").get<std::vector<double>>(), require("beta").get<double>()};
      coupling = expand_coupling(rc, m, options.allow_decoupled);
    }
    return validate(ProblemParams{n, m, p, std::move(coupling)}, options);
  } catch (const Json::exception& e) {
    throw ValidationError(ValidationKind::options, std::string("malformed config: ") + e.what());
  }
}

Json params_to_json(const ValidatedParams& params) {
  Json j;
  j["dimension"] = params.dimension();
  j["components"] = params.components();
  j["exponent"] = params.exponent();
  j["coupling_matrix"] = params.coupling().row_major();
  j["allow_out_of_range"] = params.options().allow_out_of_range;
  j["allow_decoupled"] = params.options().allow_decoupled;
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path, "cannot open for reading");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw IoError(path, e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// Reports

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  finish(os, path);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json provenance(const Json& config, std::uint64_t seed,
                const std::vector<std::pair<std::string, std::uint64_t>>& grids) {
  Json g = Json::object();
  for (const auto& [name, h] : grids) g[name] = hex(h);
  return {{"version", BCNLS_VERSION}, {"config", config}, {"seed", seed}, {"grids", g}};
}

Json to_json(const FunctionalReport& r) {
  Json j = Json::object();
  const auto cols = functional_report_columns(static_cast<int>(r.mass.size()));
  const auto vals = functional_report_values(r);
  for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = num(vals[i]);
  return j;
}

CsvTable functional_csv(const FunctionalReport& r) {
  CsvTable t{functional_report_columns(static_cast<int>(r.mass.size())), {}};
  std::vector<std::string> row;
  for (double v : functional_report_values(r)) row.push_back(format_double(v));
  t.rows.push_back(std::move(row));
  return t;
}

Json to_json(const GroundStateResult& r) {
  Json constraints = Json::array();
  for (const auto& c : r.constraint_values) constraints.push_back({{"pair", pair_json(c.pair)}, {"K", num(c.K)}});
  Json pos = Json::array();
  for (const auto& p : r.positivity) {
    pos.push_back({{"core_positive", p.core_positive},
                   {"first_sign_change", num(p.first_sign_change)},
                   {"min_relative", num(p.min_relative)}});
  }
  Json j{{"residual_sup", num(r.residual_sup)},
         {"raw_residual_sup", num(r.raw_residual_sup)},
         {"iterations", r.iterations},
         {"action_level", num(r.action_level)},
         {"constraints", constraints},
         {"component_masses", nums(r.component_masses)},
         {"active", r.active},
         {"semi_trivial", r.semi_trivial},
         {"normalization", to_string(r.normalization_used)},
         {"positivity", pos},
         {"restarts", r.restarts}};
  if (r.pohozaev.defined) {
    j["pohozaev"] = {{"ratio_kinetic", num(r.pohozaev.ratio_kinetic)},
                     {"ratio_potential", num(r.pohozaev.ratio_potential)},
                     {"expected_kinetic", num(r.pohozaev.expected_kinetic)},
                     {"expected_potential", num(r.pohozaev.expected_potential)},
                     {"residual_kinetic", num(r.pohozaev.residual_kinetic)},
                     {"residual_potential", num(r.pohozaev.residual_potential)}};
  } else {
    j["pohozaev"] = nullptr;
  }
  return j;
}

Json to_json(const BetaSweepReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"beta", num(row.beta)},
                    {"semi_trivial_action", num(row.semi_trivial_action)},
                    {"semi_trivial_component", row.semi_trivial_component},
                    {"vector_action", num(row.vector_action)},
                    {"vector_source", row.vector_source},
                    {"classification", row.classification},
                    {"note", row.note}});
  }
  Json j{{"dimension", r.dimension}, {"exponent", r.exponent}, {"mu", nums(r.mu)}, {"rows", rows}};
  j["crossover"] = r.crossover ? Json::array({r.crossover->first, r.crossover->second}) : Json(nullptr);
  return j;
}

CsvTable beta_sweep_csv(const BetaSweepReport& r) {
  CsvTable t{{"beta", "semi_trivial_action", "semi_trivial_component", "vector_action", "vector_source",
              "classification", "note"},
             {}};
  for (const auto& row : r.rows) {
    t.rows.push_back({format_double(row.beta), format_double(row.semi_trivial_action),
                      std::to_string(row.semi_trivial_component),
                      row.vector_action ? format_double(*row.vector_action) : "", row.vector_source,
                      row.classification, row.note});
  }
  return t;
}

Json to_json(const GNResult& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) {
    cands.push_back({{"label", c.label},
                     {"converged", c.converged},
                     {"J", num(c.J)},
                     {"iterations", c.iterations},
                     {"note", c.note}});
  }
  return {{"alpha_min", num(r.alpha_min)},
          {"C_best", num(r.C_best)},
          {"el_residual", num(r.el_residual)},
          {"alpha_from_el", num(r.alpha_from_el)},
          {"kinetic", num(r.kinetic)},
          {"l2", num(r.l2)},
          {"potential", num(r.potential)},
          {"selected", r.selected},
          {"semi_trivial", r.semi_trivial},
          {"candidates", cands},
          {"closed_form_C", num(r.closed_form_C)},
          {"relative_gap", num(r.relative_gap)}};
}

Json to_json(const CrossValidation& r) {
  return {{"variational_C", num(r.variational_C)},
          {"closed_form_C", num(r.closed_form_C)},
          {"vector_ansatz_J", num(r.vector_ansatz_J)},
          {"semi_trivial_ansatz_J", num(r.semi_trivial_ansatz_J)},
          {"ansatz_C", num(r.ansatz_C)},
          {"gap_variational_closed", num(r.gap_variational_closed)},
          {"gap_variational_ansatz", num(r.gap_variational_ansatz)},
          {"gap_closed_ansatz", num(r.gap_closed_ansatz)},
          {"closed_over_variational", num(r.closed_over_variational)},
          {"in_regime", r.in_regime},
          {"tolerance", r.tolerance},
          {"outcome", r.outcome},
          {"ansatz_outcome", r.ansatz_outcome}};
}

Json to_json(const InequalityReport& r) {
  return {{"probes", r.probes},
          {"violations", r.violations},
          {"max_ratio", num(r.max_ratio)},
          {"minimizer_ratio", num(r.minimizer_ratio)}};
}

Json to_json(const TrajectoryReport& r) {
  Json j{{"components", r.components},
         {"samples", r.samples()},
         {"aborted", r.aborted},
         {"abort_reason", r.abort_reason},
         {"last_reliable_time", num(r.last_reliable_time)},
         {"final_time", num(r.final_state.time)},
         {"steps", r.final_state.step_count}};
  Json pairs = Json::array();
  for (const auto& p : r.pairs) pairs.push_back(pair_json(p));
  j["pairs"] = pairs;
  if (r.samples() > 0) {
    Json mass = Json::array();
    for (const auto& s : r.mass_series) mass.push_back(num(s.back()));
    j["final_mass"] = mass;
    j["final_energy"] = num(r.energy_series.back());
    double kmax = 0.0;
    for (double k : r.kinetic_series) kmax = std::max(kmax, k);
    j["max_kinetic"] = num(kmax);
  }
  if (r.threshold_margin) {
    const auto& m = *r.threshold_margin;
    j["threshold_margin"] = {{"total_mass", num(m.total_mass)},   {"threshold", num(m.threshold)},
                             {"factor", num(m.factor)},           {"energy", num(m.energy)},
                             {"ceiling", num(m.ceiling)},         {"below_threshold", m.below_threshold}};
  } else {
    j["threshold_margin"] = nullptr;
  }
  return j;
}

CsvTable trajectory_csv(const TrajectoryReport& r) {
  CsvTable t;
  t.header.push_back("t");
  for (int j = 0; j < r.components; ++j) t.header.push_back("mass_" + std::to_string(j + 1));
  for (const char* c : {"energy", "kinetic", "action", "tail"}) t.header.push_back(c);
  const bool membership = !r.membership_series.empty();
  for (const auto& p : r.pairs) {
    const auto tag = pair_tag(p);
    t.header.push_back("K_" + tag);
    t.header.push_back("K_scale_" + tag);
    if (membership) t.header.push_back("membership_" + tag);
  }
  for (std::size_t s = 0; s < r.samples(); ++s) {
    std::vector<std::string> row{format_double(r.times[s])};
    for (const auto& series : r.mass_series) row.push_back(format_double(series[s]));
    row.push_back(format_double(r.energy_series[s]));
    row.push_back(format_double(r.kinetic_series[s]));
    row.push_back(format_double(r.action_series[s]));
    row.push_back(format_double(r.tail_series[s]));
    for (std::size_t q = 0; q < r.pairs.size(); ++q) {
      row.push_back(format_double(r.K_series[q][s]));
      row.push_back(format_double(r.K_scale_series[q][s]));
      if (membership) row.push_back(to_string(r.membership_series[q][s]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace bcnls
