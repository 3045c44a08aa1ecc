#include "syncnet/io.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "syncnet/error.hpp"

namespace syncnet::io {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("syncnet_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

json rotation_system() {
  return system_to_json(LinearSystem(rotation(1.0), Mat{{1.0, 0.0}}));
}

json ring() { return matrix_to_json(Mat{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}, "lambda"); }

TEST(MatrixJsonTest, RoundTripIsBitIdentical) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 50; ++t) {
    Mat m(3, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng) / (1 + t);
    m(0, 0) = 1.0 / 3.0;
    m(1, 1) = 5e-324;
    const json j = json::parse(matrix_to_json(m, "M").dump());
    EXPECT_EQ(matrix_from_json(j), m);
    EXPECT_EQ(j["name"], "M");
  }
}

TEST(MatrixJsonTest, RowMajorLayout) {
  const json j = json::parse(R"({"name":"X","rows":2,"cols":3,"data":[1,2,3,4,5,6]})");
  const Mat m = matrix_from_json(j);
  EXPECT_EQ(m(0, 2), 3.0);
  EXPECT_EQ(m(1, 0), 4.0);
}

TEST(MatrixJsonTest, RejectsBadInput) {
  EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":2,"cols":2,"data":[1,2,3]})")), InputError);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":0,"cols":2,"data":[]})")), InputError);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":1,"cols":1,"data":["x"]})")), InputError);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":1,"data":[1]})")), InputError);
  EXPECT_THROW(matrix_from_json(json::parse(R"([1, 2])")), InputError);
}

TEST(FormatTest, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST_F(IoTest, SystemFromPaths) {
  write_json_file(dir_ / "a.json", matrix_to_json(rotation(1.0), "A"));
  const json sys = {{"A", "a.json"}, {"C", matrix_to_json(Mat{{1.0, 0.0}}, "C")}};
  const LinearSystem parsed = system_from_json(sys, dir_);
  EXPECT_EQ(parsed.a(), rotation(1.0));
  EXPECT_THROW(system_from_json(json{{"A", "missing.json"}, {"C", sys["C"]}}, dir_), InputError);
  EXPECT_THROW(system_from_json(json{{"A", matrix_to_json(Mat::Ones(2, 3))}, {"C", sys["C"]}}),
               InputError);
}

TEST_F(IoTest, MalformedFile) {
  std::ofstream(dir_ / "bad.json") << "{ not json";
  EXPECT_THROW(read_json_file(dir_ / "bad.json"), InputError);
}

TEST(ScenarioTest, SynthesizedOutputCoupled) {
  const json j = {{"mode", "output_coupled"}, {"system", rotation_system()},
                  {"topology", ring()},       {"initial", {{"seed", 3}}},
                  {"horizon", 50},            {"snapshot_stride", 5}};
  const auto parsed = scenario_from_json(j, {});
  EXPECT_TRUE(parsed.synthesis.has_value());
  EXPECT_EQ(parsed.scenario.gain.rows(), 2);
  EXPECT_EQ(parsed.scenario.horizon, 50);
  EXPECT_EQ(parsed.scenario.snapshot_stride, 5);
  EXPECT_EQ(parsed.scenario.seed, 3u);
  EXPECT_EQ(parsed.scenario.initial.states, random_initial_state(2, 3, 3).states);
}

TEST(ScenarioTest, SeedOverride) {
  const json j = {{"system", rotation_system()}, {"topology", ring()},
                  {"initial", {{"seed", 3}}},    {"horizon", 5}};
  ScenarioOptions opts;
  opts.seed_override = 99;
  EXPECT_EQ(scenario_from_json(j, {}, opts).scenario.seed, 99u);
}

TEST(ScenarioTest, ExplicitStatesAndDualGain) {
  const json j = {{"mode", "dual"},
                  {"system", rotation_system()},
                  {"topology", ring()},
                  {"gain", matrix_to_json(Mat{{0.5, 0.8}})},
                  {"initial", {{"states", {{1, 0}, {0, 1}, {1, 1}}}}},
                  {"horizon", 5}};
  const auto parsed = scenario_from_json(j, {});
  EXPECT_EQ(parsed.scenario.mode, CouplingMode::kDual);
  EXPECT_FALSE(parsed.synthesis.has_value());
  EXPECT_EQ(parsed.scenario.initial.states(1, 2), 1.0);
  EXPECT_EQ(parsed.scenario.initial.states(0, 1), 0.0);
  json wrong = j;
  wrong["gain"] = matrix_to_json(Mat{{0.5}, {0.8}});
  EXPECT_THROW(scenario_from_json(wrong, {}), InputError);
}

TEST(ScenarioTest, OrthogonalNeedsValidPair) {
  json j = {{"mode", "orthogonal"}, {"topology", ring()}, {"q", matrix_to_json(rotation(1.0))},
            {"h", matrix_to_json(Mat{{1.0, 0.0}})}, {"initial", {{"seed", 1}}}, {"horizon", 5}};
  EXPECT_EQ(scenario_from_json(j, {}).scenario.mode, CouplingMode::kOrthogonal);
  j["q"] = matrix_to_json(Mat::Identity(2, 2));
  EXPECT_THROW(scenario_from_json(j, {}), InputError);
  j.erase("q");
  EXPECT_THROW(scenario_from_json(j, {}), InputError);
}

TEST(ScenarioTest, ValidationErrors) {
  const json base = {{"system", rotation_system()}, {"topology", ring()},
                     {"initial", {{"seed", 1}}},    {"horizon", 5}};
  json bad_mode = base;
  bad_mode["mode"] = "continuous";
  EXPECT_THROW(scenario_from_json(bad_mode, {}), InputError);
  json no_horizon = base;
  no_horizon.erase("horizon");
  EXPECT_THROW(scenario_from_json(no_horizon, {}), InputError);
  json disconnected = base;
  disconnected["topology"] = matrix_to_json(Mat::Identity(3, 3));
  EXPECT_THROW(scenario_from_json(disconnected, {}), InputError);
  ScenarioOptions allow;
  allow.allow_disconnected = true;
  EXPECT_FALSE(scenario_from_json(disconnected, {}, allow).scenario.topology.connected());
  json bad_states = base;
  bad_states["initial"] = {{"states", {{1, 0}}}};
  EXPECT_THROW(scenario_from_json(bad_states, {}), InputError);
}

TEST(TraceCsvTest, LayoutAndSnapshots) {
  const json j = {{"system", rotation_system()}, {"topology", ring()},
                  {"initial", {{"seed", 2}}},    {"horizon", 4}, {"snapshot_stride", 2}};
  const auto parsed = scenario_from_json(j, {});
  const auto trace = run(parsed.scenario);
  std::ostringstream out;
  write_trace_csv(out, trace, parsed.scenario, true);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,sync_error,disagreement,x0_0,x0_1,x1_0,x1_1,x2_0,x2_1");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1].substr(rows[1].size() - 6), ",,,,,,");
  EXPECT_NE(rows[2].back(), ',');
  const json summary = trace_summary(trace, parsed.scenario);
  EXPECT_EQ(summary["horizon"], 4);
  EXPECT_EQ(summary["digest"], trace.digest);
}

TEST(ReportJsonTest, SynthesisReportHasAllFields) {
  const LinearSystem sys(rotation(1.0), Mat{{1.0, 0.0}});
  const auto g = synthesize(sys);
  const json j = synthesis_to_json(g, sys, {});
  for (const char* key : {"L", "R", "H", "Q", "n1", "n2", "residuals", "alpha"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["alpha"].get<double>(), std::abs(std::cos(1.0)), 1e-12);
  const LinearSystem stable(Mat::Constant(1, 1, 0.5), Mat::Ones(1, 1));
  const json z = synthesis_to_json(synthesize(stable), stable, {});
  EXPECT_EQ(z["n1"], 0);
  EXPECT_TRUE(z["R"].is_null());
  EXPECT_EQ(matrix_from_json(z["L"]), Mat::Zero(1, 1));
}

}  // namespace
}  // namespace syncnet::io
