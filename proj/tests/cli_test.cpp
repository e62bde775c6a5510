#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pfab::cli;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pfab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& content) {
    const auto path = (dir_ / name).string();
    std::ofstream(path, std::ios::binary) << content;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  std::string sim_config(const std::string& extra_train = "", std::size_t steps = 20) const {
    return R"({"env":{"preset":"anticorrelated","prompts":3,"candidates":6,"objectives":2,"seed":5},)"
           R"("train":{"steps":)" + std::to_string(steps) + extra_train + R"(},"output":")" +
           path("trace.csv") + "\"}";
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

const std::string kGood =
    R"({"id":"r1","group_id":0,"task":"grounding","response_text":"<factual>f</factual><thinking>Global Search, Causal Verification, Final Alignment, Antecedent, Visual Verification, Consequence</thinking><answering>[12.5, 20.0]</answering>","gt_segments":[[12.5,20.0]]})";
const std::string kNoAnswer =
    R"({"id":"r2","group_id":0,"task":"multichoice","response_text":"A"})";

TEST_F(CliTest, ScoreWellFormed) {
  EXPECT_EQ(cmd_score(file("in.jsonl", kGood + "\n"), {}, out_, err_), kOk);
  const auto j = json::parse(out_.str());
  EXPECT_EQ(j["id"], "r1");
  EXPECT_EQ(j["rewards"]["format"], 1.0);
  EXPECT_EQ(j["rewards"]["task"], 1.0);
  EXPECT_EQ(j["rewards"]["length"], 1.0);
  EXPECT_TRUE(j["diagnostics"].is_object());
}

TEST_F(CliTest, ScoreReportsBadRecordAndContinues) {
  EXPECT_EQ(cmd_score(file("in.jsonl", kNoAnswer + "\n" + kGood + "\n"), {}, out_, err_),
            kInvalidInput);
  std::istringstream lines(out_.str());
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(json::parse(first)["id"], "r2");
  EXPECT_TRUE(json::parse(first).contains("error"));
  EXPECT_EQ(json::parse(second)["id"], "r1");
}

TEST_F(CliTest, ScoreEmptyFile) {
  EXPECT_EQ(cmd_score(file("in.jsonl", ""), {}, out_, err_), kOk);
  EXPECT_EQ(out_.str(), "");
}

TEST_F(CliTest, ScoreMalformedJsonAndMissingFile) {
  EXPECT_EQ(cmd_score(file("in.jsonl", "{not json\n"), {}, out_, err_), kInvalidInput);
  EXPECT_EQ(cmd_score(path("missing.jsonl"), {}, out_, err_), kIoFailure);
}

TEST_F(CliTest, ScorePerRecordLengthConfig) {
  auto rec = json::parse(kGood);
  rec["l_max"] = 6;
  rec["l_buffer"] = 2;
  EXPECT_EQ(cmd_score(file("in.jsonl", rec.dump() + "\n"), {}, out_, err_), kOk);
  EXPECT_EQ(json::parse(out_.str())["rewards"]["length"], 0.0);
}

TEST_F(CliTest, SolveOppositeColumns) {
  EXPECT_EQ(cmd_solve(file("m.csv", "1,-1\n-1,1\n2,-2\n"), {}, out_, err_), kOk);
  const auto j = json::parse(out_.str());
  EXPECT_NEAR(j["alpha"][0].get<double>(), 0.5, 1e-9);
  EXPECT_NEAR(j["alpha"][1].get<double>(), 0.5, 1e-9);
  EXPECT_LT(j["residual"].get<double>(), 1e-8);
}

TEST_F(CliTest, SolveSingleColumnAndHeader) {
  EXPECT_EQ(cmd_solve(file("m.csv", "x\n1\n2\n4\n"), {}, out_, err_), kOk);
  EXPECT_EQ(json::parse(out_.str())["alpha"], json::array({1.0}));
}

TEST_F(CliTest, SolveMalformed) {
  EXPECT_EQ(cmd_solve(file("m.csv", "1,2\n3,abc\n"), {}, out_, err_), kInvalidInput);
  EXPECT_NE(err_.str().find("column 2"), std::string::npos) << err_.str();
  EXPECT_EQ(cmd_solve(file("r.csv", "1,2\n3\n"), {}, out_, err_), kInvalidInput);
}

TEST_F(CliTest, AdvantagesFixture) {
  const std::string csv = PFAB_FIXTURE_DIR "/discrimination.csv";
  AdvantageOptions grpo;
  grpo.engine = "grpo";
  ASSERT_EQ(cmd_advantages(csv, grpo, out_, err_), kOk);
  for (const auto& a : json::parse(out_.str())["advantages"]) EXPECT_EQ(a.get<double>(), 0.0);

  std::ostringstream pfab_out;
  ASSERT_EQ(cmd_advantages(csv, {}, pfab_out, err_), kOk);
  const auto j = json::parse(pfab_out.str());
  double largest = 0.0;
  for (const auto& a : j["advantages"]) largest = std::max(largest, std::abs(a.get<double>()));
  EXPECT_GT(largest, 0.1);
  EXPECT_EQ(j["groups"].size(), 1u);
}

TEST_F(CliTest, AdvantagesSingleObjectiveEnginesAgree) {
  const auto csv = file("m.csv", "group_id,r\n0,1\n0,2\n0,3.5\n1,4\n1,0\n");
  AdvantageOptions grpo;
  grpo.engine = "grpo";
  std::ostringstream a, b;
  ASSERT_EQ(cmd_advantages(csv, {}, a, err_), kOk);
  ASSERT_EQ(cmd_advantages(csv, grpo, b, err_), kOk);
  const auto ja = json::parse(a.str())["advantages"];
  const auto jb = json::parse(b.str())["advantages"];
  ASSERT_EQ(ja.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(ja[i].get<double>(), jb[i].get<double>(), 1e-9);
}

TEST_F(CliTest, AdvantagesErrors) {
  const auto csv = file("m.csv", "group_id,r\n0,1\n0,2\n");
  AdvantageOptions bad;
  bad.engine = "ppo";
  EXPECT_EQ(cmd_advantages(csv, bad, out_, err_), kInvalidInput);
  EXPECT_EQ(cmd_advantages(file("n.csv", "a,b\n0,1\n"), {}, out_, err_), kInvalidInput);
  EXPECT_EQ(cmd_advantages(path("nope.csv"), {}, out_, err_), kIoFailure);
}

TEST_F(CliTest, SimulateBothEnginesAndRerun) {
  const auto cfg = file("sim.json", sim_config());
  SimulateOptions opts;
  opts.engine = "both";
  ASSERT_EQ(cmd_simulate(cfg, opts, out_, err_), kOk) << err_.str();
  const auto summary = json::parse(out_.str());
  ASSERT_EQ(summary["runs"].size(), 2u);
  const auto pfab_csv = slurp(path("trace_pfab.csv"));
  const auto grpo_csv = slurp(path("trace_grpo.csv"));
  EXPECT_EQ(std::count(pfab_csv.begin(), pfab_csv.end(), '\n'), 21);
  EXPECT_NE(grpo_csv.find(",grpo,"), std::string::npos);

  std::ostringstream again;
  ASSERT_EQ(cmd_simulate(cfg, opts, again, err_), kOk);
  EXPECT_EQ(again.str(), out_.str());
  EXPECT_EQ(slurp(path("trace_pfab.csv")), pfab_csv);
  EXPECT_EQ(slurp(path("trace_grpo.csv")), grpo_csv);
}

TEST_F(CliTest, SimulateZeroStepsWritesHeaderOnly) {
  ASSERT_EQ(cmd_simulate(file("sim.json", sim_config("", 0)), {}, out_, err_), kOk);
  const auto csv = slurp(path("trace.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_TRUE(json::parse(out_.str())["runs"][0]["front_fraction"].is_null());
}

TEST_F(CliTest, SimulateNamesBadField) {
  EXPECT_EQ(cmd_simulate(file("sim.json", sim_config(R"(,"clip_eps":1.5)")), {}, out_, err_),
            kInvalidInput);
  EXPECT_NE(err_.str().find("train.clip_eps"), std::string::npos) << err_.str();
  err_.str("");
  EXPECT_EQ(cmd_simulate(file("sim2.json", sim_config(R"(,"bogus":1)")), {}, out_, err_),
            kInvalidInput);
  EXPECT_NE(err_.str().find("train.bogus"), std::string::npos) << err_.str();
  EXPECT_EQ(cmd_simulate(path("none.json"), {}, out_, err_), kIoFailure);
}

TEST_F(CliTest, CompareShape) {
  const auto cfg = file("sim.json", sim_config());
  ASSERT_EQ(cmd_compare(cfg, {}, out_, err_), kOk) << err_.str();
  const auto j = json::parse(out_.str());
  ASSERT_EQ(j["engines"].size(), 2u);
  for (const auto& e : j["engines"]) {
    EXPECT_EQ(e["runs"].size(), 5u);
    EXPECT_TRUE(e["aggregate"].contains("min_objective_mean"));
    EXPECT_TRUE(e["aggregate"].contains("final_mean_r_obj0"));
  }
}

TEST_F(CliTest, CompareSingleSeedHasZeroSpread) {
  CompareOptions opts;
  opts.seeds = 1;
  ASSERT_EQ(cmd_compare(file("sim.json", sim_config()), opts, out_, err_), kOk);
  for (const auto& e : json::parse(out_.str())["engines"]) {
    for (const auto& [name, stats] : e["aggregate"].items()) EXPECT_EQ(stats["std"], 0.0) << name;
  }
}

TEST_F(CliTest, CompareSameEngineTwice) {
  CompareOptions opts;
  opts.seeds = 2;
  opts.engines = {"pfab", "pfab"};
  ASSERT_EQ(cmd_compare(file("sim.json", sim_config()), opts, out_, err_), kOk);
  const auto j = json::parse(out_.str());
  EXPECT_EQ(j["engines"][0]["aggregate"], j["engines"][1]["aggregate"]);
  opts.engines = {"ppo"};
  EXPECT_EQ(cmd_compare(path("sim.json"), opts, out_, err_), kInvalidInput);
}

TEST(Round9, NineSignificantDigits) {
  EXPECT_EQ(round9(1.0 / 3.0), 0.333333333);
  EXPECT_EQ(round9(123456789012.0), 123456789000.0);
}

}  // namespace
