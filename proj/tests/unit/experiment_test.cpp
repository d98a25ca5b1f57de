// Copyright 2026 The rstm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <rstm/experiment.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace rstm {
namespace {

namespace fs = std::filesystem;

const fs::path kData = fs::path(RSTM_SOURCE_DIR) / "tests" / "data";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("rstm_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                 "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

const char* kMinimal = R"({
  "problem": {"type": "tridiagonal_quadratic", "dim": 6, "L": 2.0},
  "oracle": {"variant": "coord"},
  "stop": {"iterations": 10},
  "seeds": [0]
})";

TEST(Config, GoldenCanonicalForm) {
  const auto c = load_config(kData / "roundtrip_input.json");
  EXPECT_EQ(canonical_text(c), slurp(kData / "roundtrip_canonical.json"));
}

TEST(Config, CanonicalIsFixedPoint) {
  const auto c = load_config(kData / "roundtrip_canonical.json");
  EXPECT_EQ(canonical_text(c), slurp(kData / "roundtrip_canonical.json"));
}

TEST(Config, ShippedConfigsRoundTrip) {
  for (const auto& e : fs::directory_iterator(fs::path(RSTM_SOURCE_DIR) / "configs")) {
    if (e.path().extension() != ".json") continue;
    const auto c = load_config(e.path());
    EXPECT_EQ(canonical_text(parse_config_text(canonical_text(c))), canonical_text(c)) << e.path();
    EXPECT_NO_THROW(validate(c, build_problem(c.problem))) << e.path();
  }
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config_text(R"({"problem": {"type": "tridiagonal_quadratic", "dim": 3}, "oracle": {"variant": "coord"},
    "stop": {"iterations": 1}, "seeds": [0], "colour": "red"})"),
               ConfigError);
  EXPECT_THROW(parse_config_text(R"({"problem": {"type": "tridiagonal_quadratic", "dim": 3, "extra": 1},
    "oracle": {"variant": "coord"}, "stop": {"iterations": 1}, "seeds": [0]})"),
               ConfigError);
}

TEST(Config, RejectsBadValues) {
  const std::string tail = R"(, "stop": {"iterations": 1}, "seeds": [0]})";
  const std::string prob = R"({"problem": {"type": "tridiagonal_quadratic", "dim": 3}, )";
  EXPECT_THROW(parse_config_text(prob + R"("oracle": {"variant": "newton"})" + tail), ConfigError);
  EXPECT_THROW(parse_config_text(prob + R"("oracle": {"variant": "coord"}, "rho": 0.5)" + tail), ConfigError);
  EXPECT_THROW(parse_config_text(prob + R"("oracle": {"variant": "coord", "noise": {"model": "uniform", "level": -1}})" + tail),
               ConfigError);
  EXPECT_THROW(parse_config_text(prob + R"("oracle": {"variant": "coord"}, "stop": {"iterations": 1, "epsilon": 1}, "seeds": [0]})"),
               ConfigError);
  EXPECT_THROW(parse_config_text(prob + R"("oracle": {"variant": "coord"}, "stop": {"iterations": 1}, "seeds": [1, 1]})"),
               ConfigError);
  EXPECT_THROW(parse_config_text("{not json"), ConfigError);
}

TEST(Config, InlineMatrixCap) {
  Json j = Json::parse(kMinimal);
  Json A = Json::array();
  for (int i = 0; i < 65; ++i) {
    Json row = Json::array();
    for (int k = 0; k < 65; ++k) row.push_back(i == k ? 1.0 : 0.0);
    A.push_back(row);
  }
  j["problem"] = {{"type", "coupled_quadratic"}, {"A", A}, {"b", std::vector<double>(65, 0.0)}};
  EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, ValidateCatchesIncompatiblePairing) {
  const auto c = parse_config_text(R"({"problem": {"type": "simplex_quadratic", "generator": {"blocks": 2, "block_dim": 3}},
    "oracle": {"variant": "coord"}, "stop": {"iterations": 1}, "seeds": [0]})");
  EXPECT_THROW(validate(c, build_problem(c.problem)), ConfigError);
}

TEST(Generators, SameSeedSameProblem) {
  const Json spec = {{"type", "coupled_quadratic"}, {"generator", {{"seed", 4}, {"blocks", 3}, {"block_dim", 2}}}};
  const auto a = std::dynamic_pointer_cast<const CoupledQuadratic>(build_problem(canonical_problem(spec)));
  const auto b = std::dynamic_pointer_cast<const CoupledQuadratic>(build_problem(canonical_problem(spec)));
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->matrix(), b->matrix());
  EXPECT_EQ(a->num_blocks(), 3u);
}

TEST(Run, MinimalTraceHasElevenRows) {
  TempDir t;
  const auto res = run_experiment(parse_config_text(kMinimal), {t.path(), 1, 0});
  const auto tr = lines(t.path() / trace_file_name(0));
  ASSERT_EQ(tr.size(), 12u);
  EXPECT_EQ(tr[0], kTraceHeader);
  EXPECT_EQ(lines(t.path() / "summary.csv")[0], kSummaryHeader);
  EXPECT_EQ(res.summary.size(), 11u);
}

TEST(Run, FiftySeedsFiftyTraces) {
  TempDir t;
  Json j = Json::parse(kMinimal);
  j["seeds"] = Json::array();
  for (int s = 0; s < 50; ++s) j["seeds"].push_back(s);
  run_experiment(parse_config(j), {t.path(), 4, 0});
  std::size_t traces = 0, summaries = 0;
  for (const auto& e : fs::directory_iterator(t.path())) {
    traces += e.path().filename().string().starts_with("trace_seed_");
    summaries += e.path().filename() == "summary.csv";
  }
  EXPECT_EQ(traces, 50u);
  EXPECT_EQ(summaries, 1u);
}

TEST(Run, DeterministicAcrossWorkerCounts) {
  TempDir t;
  Json j = Json::parse(kMinimal);
  j["seeds"] = {5, 6, 7, 8};
  j["oracle"] = {{"variant", "df_coord"}, {"noise", {{"model", "uniform"}, {"level", 1e-6}}}};
  const auto c = parse_config(j);
  run_experiment(c, {t.path() / "a", 1, 0});
  run_experiment(c, {t.path() / "b", 4, 0});
  auto strip = [](const fs::path& p) {
    std::string out;
    for (auto l : lines(p)) out += l.substr(0, l.rfind(',')) + "\n";
    return out;
  };
  for (int s : {5, 6, 7, 8})
    EXPECT_EQ(strip(t.path() / "a" / trace_file_name(s)), strip(t.path() / "b" / trace_file_name(s)));
  EXPECT_EQ(slurp(t.path() / "a" / "summary.csv"), slurp(t.path() / "b" / "summary.csv"));
}

TEST(Run, SeedOffsetShiftsSeeds) {
  TempDir t;
  run_experiment(parse_config_text(kMinimal), {t.path(), 1, 10});
  EXPECT_TRUE(fs::exists(t.path() / trace_file_name(10)));
}

TEST(Summary, BoundRatioIsResidualOverBound) {
  TempDir t;
  const auto res = run_experiment(parse_config_text(kMinimal), {t.path(), 1, 0});
  for (const auto& r : res.summary) {
    EXPECT_GE(r.bound_ratio, 0.0);
    EXPECT_NEAR(r.bound_ratio, r.mean_residual / r.bound, 1e-15 * (1 + r.bound_ratio));
  }
  const auto back = read_summary(t.path() / "summary.csv");
  ASSERT_EQ(back.size(), res.summary.size());
  EXPECT_EQ(back.back().mean_residual, res.summary.back().mean_residual);
}

TEST(Summary, MalformedFileRejected) {
  TempDir t;
  std::ofstream(t.path() / "bad.csv") << "k,A\n1,2\n";
  EXPECT_THROW(read_summary(t.path() / "bad.csv"), ConfigError);
}

TEST(Sweep, DeltaFloorsOrdered) {
  TempDir t;
  const auto c = parse_config_text(R"({
    "problem": {"type": "separable_quadratic", "generator": {"seed": 2, "blocks": 5, "L_min": 1, "L_max": 10}},
    "oracle": {"variant": "coord"}, "stop": {"iterations": 400}, "seeds": [0, 1, 2, 3]})");
  const auto rows = run_sweep(c, "delta", {1e-2, 1e-3, 1e-4}, {t.path(), 2, 0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].floor, rows[1].floor);
  EXPECT_GT(rows[1].floor, rows[2].floor);
  EXPECT_TRUE(fs::exists(t.path() / "sweep.csv"));
  EXPECT_EQ(lines(t.path() / "sweep.csv")[0], kSweepHeader);
}

TEST(Sweep, IterationsScaleLinearlyInN) {
  TempDir t;
  const auto c = parse_config_text(R"({
    "problem": {"type": "separable_quadratic", "generator": {"seed": 1, "blocks": 2}},
    "oracle": {"variant": "coord"}, "stop": {"epsilon": 1e-4}, "seeds": [0]})");
  const auto rows = run_sweep(c, "n", {2, 10, 50}, {t.path(), 1, 0});
  // P0 grows with n here too, so compare K / (n P0)
  std::vector<double> per;
  for (const auto& r : rows) {
    const auto cn = with_parameter(c, "n", r.value);
    RunConfig rc = cn.run;
    rc.stop = StopRule::fixed(0);
    const double P0 = solve(build_problem(cn.problem), rc).P0;
    per.push_back(double(r.iterations) / (r.value * P0));
  }
  EXPECT_NEAR(per[1] / per[2], 1.0, 0.1);
  EXPECT_NEAR(per[0] / per[2], 1.0, 0.6);
}

TEST(Sweep, EmptyValuesRejected) {
  EXPECT_THROW(run_sweep(parse_config_text(kMinimal), "delta", {}, {}), ConfigError);
  EXPECT_THROW(with_parameter(parse_config_text(kMinimal), "lambda", 1.0), ConfigError);
}

TEST(Report, MergesSeriesAndIsIdempotent) {
  TempDir t;
  const auto c = parse_config_text(kMinimal);
  run_experiment(c, {t.path() / "a", 1, 0});
  run_experiment(c, {t.path() / "b", 1, 1});
  const std::vector<fs::path> in{t.path() / "a" / "summary.csv", t.path() / "b" / "summary.csv"};
  const std::string r = report(in);
  EXPECT_EQ(r, report(in));
  for (const auto& p : in)
    for (const char* s : {":mean_residual,", ":bound,", ":bound_ratio,"})
      EXPECT_NE(r.find(p.generic_string() + s), std::string::npos) << p << s;
  EXPECT_EQ(r.substr(0, r.find('\n')), kReportHeader);
}

}  // namespace
}  // namespace rstm
