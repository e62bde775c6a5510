// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "pfab/advantage.hpp"
#include "pfab/minnorm.hpp"
#include "pfab/rewards.hpp"
#include "pfab/simulator.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and sizes, fixed by the criteria.
constexpr double kGridStep = 1e-3;
constexpr double kGridGap = 1e-4;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kFeasibility = 1e-9;
constexpr double kSolveMillis = 1.0;
constexpr double kReductionTol = 1e-9;
constexpr double kMeanTol = 1e-9;
constexpr double kDispersionTol = 1e-6;
constexpr double kDiscriminationMin = 0.1;
constexpr double kScaleTol = 1e-9;
constexpr double kRewardTol = 1e-9;
constexpr double kMeasureTol = 2e-3;
constexpr std::size_t kMinCorpus = 30;
constexpr double kGradientTol = 1e-5;
constexpr double kFiniteStep = 1e-6;
constexpr double kTrainingLift = 1.2;
constexpr double kTrainingSeconds = 30.0;
constexpr double kResidualTol = 1e-8;
constexpr int kTrials = 100;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::Index cols_for(int trial) { return 2 + trial % 2; }

pfab::GroupedRewardMatrix one_group(const Eigen::MatrixXd& r) {
  pfab::GroupedRewardMatrix m;
  m.rewards = r;
  m.groups.assign(static_cast<std::size_t>(r.rows()), 0);
  for (Eigen::Index j = 0; j < r.cols(); ++j) m.objective_names.push_back("o" + std::to_string(j));
  return m;
}

Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

double population_sd(const Eigen::VectorXd& v) {
  return std::sqrt((v.array() - v.mean()).square().mean());
}

Verdict frank_wolfe() {
  std::mt19937_64 rng(1);
  std::vector<Eigen::MatrixXd> cases;
  for (int t = 0; t < kTrials; ++t) cases.push_back(oracle::random_standardized(rng, 8, cols_for(t)));

  auto run = [&](const pfab::SolverParams& params, int& over_gap, double& worst_gap,
                 double& worst_ms, bool& monotone, bool& feasible) {
    over_gap = 0;
    worst_gap = 0.0;
    worst_ms = 0.0;
    monotone = feasible = true;
    for (const auto& x : cases) {
      const auto d = pfab::StandardizedDeltas::from_matrix(x);
      double previous = std::numeric_limits<double>::infinity();
      const auto w = pfab::min_norm_weights(d, params, [&](const Eigen::VectorXd& a) {
        const double value = (x * a).squaredNorm();
        monotone = monotone && value <= previous + kMonotoneSlack;
        previous = value;
        feasible = feasible && std::abs(a.sum() - 1.0) <= kFeasibility &&
                   a.minCoeff() >= -kFeasibility;
      });
      double best_ms = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = Clock::now();
        const auto again = pfab::min_norm_weights(d, params);
        best_ms = std::min(best_ms, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        if (again.residual != w.residual) feasible = false;
      }
      worst_ms = std::max(worst_ms, best_ms);
      const double gap = w.residual - oracle::simplex_grid_min(x, kGridStep).value;
      worst_gap = std::max(worst_gap, gap);
      if (gap > kGridGap) ++over_gap;
    }
  };

  int over = 0;
  double gap = 0.0, ms = 0.0;
  bool monotone = true, feasible = true;
  run({}, over, gap, ms, monotone, feasible);

  // Same cases with a budget large enough to close the gap, for the record.
  pfab::SolverParams large;
  large.max_iter = 100000;
  int over_large = 0;
  double gap_large = 0.0, ms_large = 0.0;
  bool mono_large = true, feas_large = true;
  run(large, over_large, gap_large, ms_large, mono_large, feas_large);

  Verdict v;
  v.pass = over == 0 && monotone && feasible && ms < kSolveMillis;
  v.detail = "default budget (max_iter 50): " + std::to_string(over) + "/" +
             std::to_string(kTrials) + " over the 1e-4 grid gap, worst gap " + fmt("%.3g", gap) +
             ", monotone " + (monotone ? "yes" : "no") + ", feasible " + (feasible ? "yes" : "no") +
             ", slowest solve " + fmt("%.3g", ms) + " ms; max_iter 100000: " +
             std::to_string(over_large) + " over, worst gap " + fmt("%.3g", gap_large) +
             ", slowest solve " + fmt("%.3g", ms_large) + " ms";
  return v;
}

Verdict reductions() {
  std::mt19937_64 rng(2);
  double worst_reduction = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto m = one_group(uniform_matrix(rng, 8, 1));
    const Eigen::VectorXd diff = pfab::pfab_advantages(m).values - pfab::grpo_advantages(m).values;
    worst_reduction = std::max(worst_reduction, diff.cwiseAbs().maxCoeff());
  }

  bool zeros = true;
  for (const Eigen::MatrixXd& r : {Eigen::MatrixXd(Eigen::MatrixXd::Constant(8, 3, 0.3)),
                                   Eigen::MatrixXd(Eigen::MatrixXd::Zero(4, 1)),
                                   Eigen::MatrixXd(Eigen::MatrixXd::Constant(6, 2, 1e6))}) {
    zeros = zeros && (pfab::pfab_advantages(one_group(r)).values.array() == 0.0).all();
  }

  double worst_mean = 0.0, worst_sd = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto a = pfab::pfab_advantages(one_group(uniform_matrix(rng, 8, 1 + t % 4))).values;
    worst_mean = std::max(worst_mean, std::abs(a.mean()));
    worst_sd = std::max(worst_sd, std::abs(population_sd(a) - 1.0));
  }

  Verdict v;
  v.pass = worst_reduction <= kReductionTol && zeros && worst_mean <= kMeanTol &&
           worst_sd <= kDispersionTol;
  v.detail = "M=1 max diff " + fmt("%.3g", worst_reduction) + ", degenerate exact zeros " +
             (zeros ? "yes" : "no") + ", |mean| " + fmt("%.3g", worst_mean) + ", |sd-1| " +
             fmt("%.3g", worst_sd);
  return v;
}

Eigen::MatrixXd read_fixture_matrix(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::stringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    rows.emplace_back();
    while (std::getline(cells, cell, ',')) rows.back().push_back(std::stod(cell));
  }
  Eigen::MatrixXd r(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return r;
}

Verdict discrimination() {
  const auto m = one_group(read_fixture_matrix(PFAB_FIXTURE_DIR "/discrimination.csv"));
  const auto grpo = pfab::grpo_advantages(m);
  const auto pf = pfab::pfab_advantages(m);
  const auto s = pfab::standardize(pfab::center_rewards(m), 1e-6);
  const auto grid = oracle::simplex_grid_min(s.deltas.matrix, kGridStep);
  const double gap = std::abs(pf.residual.at(0) - grid.value);
  const bool grpo_zero = (grpo.values.array() == 0.0).all();
  const double largest = pf.values.cwiseAbs().maxCoeff();

  Verdict v;
  v.pass = m.rewards.rows() > 0 && grpo_zero && largest > kDiscriminationMin && gap <= kGridGap;
  v.detail = std::string("grpo all zero ") + (grpo_zero ? "yes" : "no") + ", pfab max|A| " +
             fmt("%.4g", largest) + ", objective gap to grid " + fmt("%.3g", gap);
  return v;
}

Verdict scale_invariance() {
  std::mt19937_64 rng(4);
  double worst_alpha = 0.0, worst_adv = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto r = uniform_matrix(rng, 8, cols_for(t));
    const auto base = pfab::pfab_advantages(one_group(r));
    const auto& alpha = base.weights.at(0).weights;
    for (double c : {0.1, 10.0}) {
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        Eigen::MatrixXd scaled = r;
        scaled.col(j) *= c;
        const auto w = pfab::pfab_advantages(one_group(scaled)).weights.at(0).weights;
        worst_alpha = std::max(worst_alpha, (w - alpha).cwiseAbs().maxCoeff());
      }
      const auto all = pfab::pfab_advantages(one_group(r * c)).values;
      worst_adv = std::max(worst_adv, (all - base.values).cwiseAbs().maxCoeff());
    }
  }
  Verdict v;
  v.pass = worst_alpha < kScaleTol && worst_adv < kScaleTol;
  v.detail = "single-column alpha change " + fmt("%.3g", worst_alpha) +
             ", common-scale advantage change " + fmt("%.3g", worst_adv);
  return v;
}

Verdict reward_suite() {
  std::ifstream in(PFAB_FIXTURE_DIR "/reward_corpus.jsonl");
  std::string line;
  std::size_t records = 0, mismatches = 0;
  std::array<bool, 3> format_tiers{};
  bool coverage_branch = false, span_branch = false, best_match = false;
  bool acc_hit = false, acc_miss = false;
  bool len_full = false, len_linear = false, len_zero = false;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    pfab::RecordInput r;
    r.id = j["id"];
    r.group_id = j["group_id"];
    const bool grounding = j["task"] == "grounding";
    r.task = grounding ? pfab::TaskKind::kGrounding : pfab::TaskKind::kMultichoice;
    r.response_text = j["response_text"];
    if (j.contains("gt_segments")) {
      std::vector<pfab::TimeSegment> gt;
      for (const auto& s : j["gt_segments"]) gt.push_back({s[0], s[1]});
      r.gt_segments = gt;
    }
    if (j.contains("gt_answer")) r.gt_answer = j["gt_answer"].get<std::string>()[0];
    const auto s = pfab::score_record(r, {j["l_max"], j["l_buffer"]});
    const auto& e = j["expected"];
    const std::array<double, 3> want = {e["format"], e["task"], e["length"]};
    const auto got = s.reward.components();
    for (std::size_t k = 0; k < 3; ++k) mismatches += std::abs(got[k] - want[k]) > kRewardTol;
    ++records;

    format_tiers[static_cast<std::size_t>(std::lround(s.reward.format * 2.0))] = true;
    const auto& task = s.diagnostics.task;
    coverage_branch |= task.find("coverage ratio") != std::string::npos;
    span_branch |= task.find("span iou") != std::string::npos;
    best_match |= task.find("best-match") != std::string::npos;
    if (!grounding) (s.reward.task == 1.0 ? acc_hit : acc_miss) = true;
    len_full |= s.reward.length == 1.0;
    len_linear |= s.reward.length > 0.0 && s.reward.length < 1.0;
    len_zero |= s.diagnostics.length.find("over l_max") != std::string::npos;
  }
  const bool branches = format_tiers[0] && format_tiers[1] && format_tiers[2] && coverage_branch &&
                        span_branch && best_match && acc_hit && acc_miss && len_full &&
                        len_linear && len_zero;

  // Continuous endpoints; lengths of at least 2 s keep the grid's
  // discretization error inside the tolerance.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> start(0.0, 18.0);
  std::uniform_real_distribution<double> length(2.0, 10.0);
  auto interval = [&] {
    const double a = start(rng);
    return oracle::Interval{a, std::min(a + length(rng), 20.5)};
  };
  double worst_measure = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto a = interval(), b = interval();
    const std::vector<oracle::Interval> gt = {interval(), interval()};
    const pfab::TimeSegment pa{a.first, a.second};
    const std::vector<pfab::TimeSegment> pred = {pa};
    const std::vector<pfab::TimeSegment> gts = {{gt[0].first, gt[0].second},
                                                {gt[1].first, gt[1].second}};
    const auto hull = pfab::segment_hull(gts);
    const double hybrid = std::max(oracle::grid_coverage(a, gt, 0.0, 21.0),
                                   oracle::grid_iou(a, {hull.start, hull.end}, 0.0, 21.0));
    worst_measure = std::max(
        {worst_measure,
         std::abs(pfab::segment_iou(pa, {b.first, b.second}) - oracle::grid_iou(a, b, 0.0, 21.0)),
         std::abs(pfab::coverage_ratio(pa, gts) - oracle::grid_coverage(a, gt, 0.0, 21.0)),
         std::abs(pfab::linear_iou_reward(pred, gts) - hybrid)});
  }

  Verdict v;
  v.pass = records >= kMinCorpus && mismatches == 0 && branches && worst_measure <= kMeasureTol;
  v.detail = std::to_string(records) + " records, " + std::to_string(mismatches) +
             " mismatches, all branches " + (branches ? "covered" : "NOT covered") +
             ", measure oracle max diff " + fmt("%.3g", worst_measure);
  return v;
}

Verdict gradient_check() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 0.5);
  std::vector<double> rewards(2 * 3 * 2);
  for (auto& r : rewards) r = u(rng);
  const pfab::sim::SyntheticEnv env(2, 3, {"a", "b"}, rewards, 6);

  pfab::sim::TrainConfig cfg;
  cfg.steps = 1;
  cfg.kl_beta = 0.1;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto policy = pfab::sim::PolicyTable::uniform(2, 3);
    for (Eigen::Index i = 0; i < 6; ++i) policy.logits.data()[i] = normal(rng);
    const Eigen::MatrixXd snapshot = policy.logits;
    const auto batch = pfab::sim::train_step(policy, env, cfg, static_cast<std::size_t>(t)).batch;
    // At the snapshot every ratio is 1; the perturbed points reach both
    // clipping branches.
    for (double spread : {0.0, 0.2, 0.5}) {
      Eigen::MatrixXd z = snapshot;
      for (Eigen::Index i = 0; i < 6; ++i) z.data()[i] += spread * normal(rng);
      const auto loss = [&](const Eigen::MatrixXd& x) {
        return pfab::sim::batch_loss(x, policy.reference_logits, batch, cfg.clip_eps, cfg.kl_beta);
      };
      const Eigen::MatrixXd analytic = pfab::sim::batch_loss_gradient(
          z, policy.reference_logits, batch, cfg.clip_eps, cfg.kl_beta);
      const Eigen::MatrixXd numeric = oracle::central_difference(loss, z, kFiniteStep);
      const double scale = std::max(numeric.cwiseAbs().maxCoeff(), 1e-12);
      worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
    }
  }
  Verdict v;
  v.pass = worst < kGradientTol;
  v.detail = "max relative error " + fmt("%.3g", worst) + " over 60 points";
  return v;
}

Verdict training_sanity() {
  const auto t0 = Clock::now();
  double worst_ratio = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto env = pfab::sim::build_env({pfab::sim::Preset::kAnticorrelated, 4, 8, 2}, seed);
    const auto uniform = pfab::sim::expected_rewards(pfab::sim::PolicyTable::uniform(4, 8), env);
    const double baseline = uniform[0] + uniform[1];
    for (auto engine : {pfab::sim::Engine::kPfab, pfab::sim::Engine::kGrpo}) {
      pfab::sim::TrainConfig cfg;
      cfg.engine = engine;
      cfg.group_size = 8;
      cfg.steps = 500;
      cfg.seed = seed;
      pfab::sim::PolicyTable final_policy;
      const auto trace = pfab::sim::run_experiment(cfg, env, &final_policy);
      for (const auto& rec : trace.steps) {
        std::vector<double> values = {rec.min_objective_mean, rec.residual_mean, rec.kl, rec.loss};
        values.insert(values.end(), rec.mean_reward.begin(), rec.mean_reward.end());
        values.insert(values.end(), rec.alpha_mean.begin(), rec.alpha_mean.end());
        for (double x : values) finite = finite && std::isfinite(x);
      }
      const auto final_rewards = pfab::sim::expected_rewards(final_policy, env);
      worst_ratio = std::min(worst_ratio, (final_rewards[0] + final_rewards[1]) / baseline);
    }
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  Verdict v;
  v.pass = worst_ratio >= kTrainingLift && finite && seconds < kTrainingSeconds;
  v.detail = "worst final/uniform summed reward " + fmt("%.4g", worst_ratio) + ", all finite " +
             (finite ? "yes" : "no") + ", " + fmt("%.2f", seconds) + " s for 10 runs";
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  Run r;
  const std::string cmd = std::string("\"") + PFAB_CLI_PATH + "\" " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  r.status = pclose(pipe);
  return r;
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "pfab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string fixtures = PFAB_FIXTURE_DIR;
  {
    std::ofstream(dir / "m.csv") << "0.3,0.9,0.1\n0.8,0.2,0.4\n0.5,0.5,0.9\n0.1,0.7,0.6\n";
    std::ofstream(dir / "sim.json")
        << R"({"env":{"preset":"sparse-vs-dense","prompts":3,"candidates":6,"objectives":2,"seed":3},)"
        << R"("train":{"steps":40,"seed":1},"output":")" << (dir / "trace.csv").string() << "\"}";
  }
  const std::string quiet = " --quiet 2>/dev/null";
  const std::vector<std::pair<std::string, std::vector<fs::path>>> commands = {
      {"score " + fixtures + "/reward_corpus.jsonl", {}},
      {"solve " + (dir / "m.csv").string(), {}},
      {"advantages " + fixtures + "/discrimination.csv", {}},
      {"advantages --engine grpo " + fixtures + "/discrimination.csv", {}},
      {"simulate --engine both " + (dir / "sim.json").string(),
       {dir / "trace_pfab.csv", dir / "trace_grpo.csv"}},
      {"compare --seeds 2 " + (dir / "sim.json").string(), {}},
  };
  int identical = 0;
  for (const auto& [args, files] : commands) {
    const auto first = run_cli(args + quiet);
    std::vector<std::string> first_files;
    for (const auto& f : files) first_files.push_back(slurp(f));
    const auto second = run_cli(args + quiet);
    bool same = first.status == 0 && second.status == 0 && !first.out.empty() &&
                first.out == second.out;
    for (std::size_t k = 0; k < files.size(); ++k) {
      same = same && !first_files[k].empty() && slurp(files[k]) == first_files[k];
    }
    identical += same;
  }
  fs::remove_all(dir);
  Verdict v;
  v.pass = identical == static_cast<int>(commands.size());
  v.detail = std::to_string(identical) + "/" + std::to_string(commands.size()) +
             " commands byte-identical across reruns";
  return v;
}

Verdict pareto_diagnostics() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  auto residual = [](const Eigen::MatrixXd& r) {
    return pfab::pareto_residual(one_group(r)).at(0).residual;
  };
  struct Family {
    const char* name;
    int below = 0;
    int total = 0;
    double worst = 0.0;
  };
  std::array<Family, 4> families = {Family{"opposite pair"}, Family{"opposite pair plus column"},
                                    Family{"general three-column"}, Family{"discrimination fixture"}};
  // For the record: the general family again with a 1000-iteration budget.
  pfab::SolverParams large;
  large.max_iter = 1000;
  int general_large_budget = 0;
  auto record = [&](Family& f, double value) {
    ++f.total;
    f.below += value < kResidualTol;
    f.worst = std::max(f.worst, value);
  };
  for (int t = 0; t < kTrials; ++t) {
    Eigen::MatrixXd r(8, 3);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = normal(rng);
    Eigen::MatrixXd pair(8, 2);
    pair << r.col(0), (3.0 - 2.0 * r.col(0).array()).matrix();
    record(families[0], residual(pair));
    Eigen::MatrixXd plus(8, 3);
    plus << pair, r.col(1);
    record(families[1], residual(plus));
    // Third column is minus the sum of the first two, so the centered columns
    // combine to zero with positive weights.
    Eigen::MatrixXd general(8, 3);
    general << r.col(0), r.col(1), -(r.col(0) + r.col(1));
    record(families[2], residual(general));
    general_large_budget +=
        pfab::pareto_residual(one_group(general), {}, large).at(0).residual < kResidualTol;
  }
  record(families[3], residual(read_fixture_matrix(PFAB_FIXTURE_DIR "/discrimination.csv")));

  std::uniform_int_distribution<int> level(0, 4);
  int front_matches = 0;
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t k = 2 + static_cast<std::size_t>(t) % 9;
    const std::size_t m = 2 + static_cast<std::size_t>(t) % 3;
    std::vector<std::vector<double>> points(k, std::vector<double>(m));
    std::vector<double> flat;
    for (auto& p : points) {
      for (auto& x : p) {
        x = level(rng) * 0.25;
        flat.push_back(x);
      }
    }
    const pfab::sim::SyntheticEnv env(1, k, std::vector<std::string>(m, "o"), flat, 0);
    front_matches += pfab::sim::pareto_front_oracle(env)[0] == oracle::nondominated(points);
  }

  Verdict v;
  v.pass = front_matches == kTrials;
  v.detail.clear();
  for (const auto& f : families) {
    v.pass = v.pass && f.below == f.total;
    v.detail += std::string(f.name) + " " + std::to_string(f.below) + "/" +
                std::to_string(f.total) + " below 1e-8 (worst " + fmt("%.3g", f.worst) + "), ";
  }
  v.detail += "general at max_iter 1000 " + std::to_string(general_large_budget) + "/" +
              std::to_string(kTrials) + ", ";
  v.detail += "front " + std::to_string(front_matches) + "/" + std::to_string(kTrials) +
              " sets match";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"Frank-Wolfe correctness", frank_wolfe},
      {"advantage reductions", reductions},
      {"discrimination fixture", discrimination},
      {"scale invariance", scale_invariance},
      {"reward suite exactness", reward_suite},
      {"simulator gradient check", gradient_check},
      {"training sanity", training_sanity},
      {"determinism", determinism},
      {"Pareto diagnostics", pareto_diagnostics},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto v = criteria[i].second();
    failed += !v.pass;
    std::printf("%s  %zu  %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
