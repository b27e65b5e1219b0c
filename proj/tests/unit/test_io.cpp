#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "bcnls/io.hpp"

using namespace bcnls;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "bcnls_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Snapshot, RadialRoundTripIsBitExact) {
  auto g = RadialGrid::make(5, 17.5, 301);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  auto f = RadialField::sample(g, 2, [&](int, double) { return nd(rng); });
  const auto path = temp_path("radial.bin");
  write_snapshot(path, f, 1.25);
  EXPECT_EQ(fs::file_size(path), 6u + 16u + 16u + 8u * 602u);
  const auto snap = read_snapshot(path);
  EXPECT_EQ(snap.kind(), SnapshotKind::radial_real);
  EXPECT_EQ(snap.time, 1.25);
  const auto& back = std::get<RadialField>(snap.field);
  EXPECT_TRUE(back.grid().same_as(*g));
  EXPECT_EQ(back.components(), 2);
  EXPECT_EQ(back.values(), f.values());
}

TEST(Snapshot, PeriodicRoundTripIsBitExact) {
  auto box = PeriodicGrid::make(3, 6, 2.5);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  auto u = ComplexField::sample(box, 2, [&](int, std::span<const double>) {
    return std::complex<double>(nd(rng), nd(rng));
  });
  const auto path = temp_path("box.bin");
  write_snapshot(path, u, -0.5);
  const auto snap = read_snapshot(path);
  EXPECT_EQ(snap.kind(), SnapshotKind::periodic_complex);
  EXPECT_EQ(snap.time, -0.5);
  const auto& back = std::get<ComplexField>(snap.field);
  EXPECT_TRUE(back.grid().same_as(*box));
  EXPECT_EQ(back.values(), u.values());
}

TEST(Snapshot, HeaderLayout) {
  auto g = RadialGrid::make(4, 10.0, 4);
  const auto path = temp_path("layout.bin");
  write_snapshot(path, RadialField(g, 1, {1.0, 2.0, 3.0, 4.0}), 0.0);
  std::ifstream is(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), {});
  ASSERT_EQ(bytes.size(), 6u + 16u + 16u + 32u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 6), "BCNLS1");
  // kind 0, N = 4, m = 1, n = 4 as little-endian u32
  const std::vector<unsigned char> ints{0, 0, 0, 0, 4, 0, 0, 0, 1, 0, 0, 0, 4, 0, 0, 0};
  EXPECT_EQ(std::vector<unsigned char>(bytes.begin() + 6, bytes.begin() + 22), ints);
}

TEST(Snapshot, RejectsBadFiles) {
  const auto bad = temp_path("bad.bin");
  { std::ofstream(bad) << "NOTASNAPSHOT"; }
  EXPECT_THROW(read_snapshot(bad), IoError);
  EXPECT_THROW(read_snapshot(temp_path("missing.bin")), IoError);

  auto g = RadialGrid::make(4, 10.0, 50);
  const auto path = temp_path("trunc.bin");
  write_snapshot(path, RadialField(g, 1), 0.0);
  fs::resize_file(path, fs::file_size(path) - 8);
  EXPECT_THROW(read_snapshot(path), IoError);
}

TEST(Config, ReducedAndMatrixForms) {
  const auto a = params_from_json(Json::parse(R"({"dimension":5,"components":2,"exponent":2,"mu":[1,2],"beta":0.5})"));
  EXPECT_EQ(a.coupling().row_major(), (std::vector<double>{1.0, 0.5, 0.5, 2.0}));
  const auto b = params_from_json(
      Json::parse(R"({"dimension":5,"components":2,"exponent":2,"coupling_matrix":[1,0.5,0.5,2]})"));
  EXPECT_EQ(a.coupling(), b.coupling());
  const auto echo = params_from_json(params_to_json(a));
  EXPECT_EQ(echo.coupling(), a.coupling());
  EXPECT_EQ(echo.exponent(), a.exponent());
}

TEST(Config, Errors) {
  auto expect_kind = [](const char* text, ValidationKind kind) {
    try {
      params_from_json(Json::parse(text));
      ADD_FAILURE() << text;
    } catch (const ValidationError& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  expect_kind(R"({"components":1,"exponent":2,"mu":[1],"beta":1})", ValidationKind::options);
  expect_kind(R"({"dimension":5,"components":1,"exponent":2,"mu":[1],"beta":1,"coupling_matrix":[1]})",
              ValidationKind::options);
  expect_kind(R"({"dimension":5,"components":1,"exponent":"two","mu":[1],"beta":1})", ValidationKind::options);
  expect_kind(R"({"dimension":5,"components":1,"exponent":6,"mu":[1],"beta":1})", ValidationKind::exponent_range);
  expect_kind(R"({"dimension":5,"components":2,"exponent":2,"coupling_matrix":[1,0.1,0.2,1]})",
              ValidationKind::coupling_symmetry);
  EXPECT_NO_THROW(params_from_json(
      Json::parse(R"({"dimension":4,"components":1,"exponent":2,"mu":[1],"beta":0,"allow_out_of_range":true})")));
}

TEST(Format, SeventeenDigitsRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp(ud(rng)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Reports, EmptyTrajectoryIsHeaderOnly) {
  TrajectoryReport r;
  r.components = 2;
  r.pairs = {{1, 0}};
  const auto csv = trajectory_csv(r).str();
  EXPECT_EQ(csv, "t,mass_1,mass_2,energy,kinetic,action,tail,K_1_0,K_scale_1_0\n");
  const auto j = to_json(r);
  EXPECT_EQ(j["samples"], 0);
  EXPECT_FALSE(j.contains("final_energy"));
}

TEST(Reports, TrajectoryRowsMatchSamples) {
  auto box = PeriodicGrid::make(2, 16, 6.0);
  MonitorConfig mc;
  mc.sample_every = 2;
  mc.pairs = {{1, 0}, {0, 1}};
  mc.m_level = 10.0;
  const auto r = evolve(gaussian_data(box, 1, 0.3), 0.1, 0.01, make_params(2, 2.0, {{1.0}, 0.0}, {.allow_out_of_range = true}), mc);
  const auto t = trajectory_csv(r);
  EXPECT_EQ(t.rows.size(), r.samples());
  for (const auto& row : t.rows) EXPECT_EQ(row.size(), t.header.size());
  EXPECT_EQ(t.header.back(), "membership_0_1");
  EXPECT_EQ(t.rows[0][t.header.size() - 4], "A_plus");
  EXPECT_EQ(std::stod(t.rows.back()[0]), r.times.back());
}

TEST(Reports, FunctionalRowUsesFixedColumns) {
  FunctionalReport f;
  f.mass = {1.0, 2.0};
  f.pair = ScalingPair{1, 0};
  f.K = 0.25;
  const auto t = functional_csv(f);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header.front(), "mass_1");
  EXPECT_EQ(t.header.back(), "J");
  EXPECT_EQ(t.rows[0].back(), "nan");
  const auto j = to_json(f);
  EXPECT_TRUE(j["J"].is_null());
  EXPECT_EQ(j["K_alpha_beta"], 0.25);
}

TEST(Reports, SweepHasClassificationColumn) {
  BetaSweepReport r;
  r.rows.push_back({0.5, 10.0, 0, std::nullopt, "", "semi-trivial", ""});
  r.rows.push_back({2.0, 10.0, 0, 6.0, "amplitudes", "vector", "note, with comma"});
  const auto t = beta_sweep_csv(r);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.header[5], "classification");
  EXPECT_EQ(t.rows[1][5], "vector");
  EXPECT_NE(t.str().find("\"note, with comma\""), std::string::npos);
}

TEST(Reports, ProvenanceIsDeterministic) {
  const Json config{{"dimension", 5}, {"exponent", 2.0}};
  auto g = RadialGrid::make(5, 20.0, 100);
  const auto a = provenance(config, 42, {{"radial", g->fingerprint()}}).dump();
  const auto b = provenance(config, 42, {{"radial", RadialGrid::make(5, 20.0, 100)->fingerprint()}}).dump();
  EXPECT_EQ(a, b);
  const auto j = Json::parse(a);
  EXPECT_EQ(j["version"], BCNLS_VERSION);
  EXPECT_EQ(j["grids"]["radial"].get<std::string>().size(), 16u);
  EXPECT_NE(a, provenance(config, 42, {{"radial", RadialGrid::make(5, 20.0, 101)->fingerprint()}}).dump());
}

TEST(Reports, WriteFailureNamesPath) {
  try {
    write_text("/proc/definitely/not/writable.txt", "x");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/definitely"), std::string::npos);
  }
}
