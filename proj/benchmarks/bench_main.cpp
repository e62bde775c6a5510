#include <benchmark/benchmark.h>

#include <random>

#include "pfab/advantage.hpp"
#include "pfab/minnorm.hpp"
#include "pfab/rewards.hpp"
#include "pfab/simulator.hpp"

namespace {

Eigen::MatrixXd random_rewards(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd r(rows, cols);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = u(rng);
  return r;
}

void BM_MinNormWeights(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto cols = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd x = random_rewards(rng, 8, cols);
  x.rowwise() -= x.colwise().mean();
  for (Eigen::Index j = 0; j < cols; ++j) x.col(j) /= std::sqrt(x.col(j).squaredNorm() / 8.0);
  const auto d = pfab::StandardizedDeltas::from_matrix(x);
  for (auto _ : state) benchmark::DoNotOptimize(pfab::min_norm_weights(d));
}
BENCHMARK(BM_MinNormWeights)->Arg(2)->Arg(3)->Arg(5);

void BM_PfabAdvantages(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto groups = state.range(0);
  pfab::GroupedRewardMatrix m;
  m.rewards = random_rewards(rng, groups * 8, 3);
  for (Eigen::Index i = 0; i < m.rewards.rows(); ++i) m.groups.push_back(i / 8);
  m.objective_names = {"format", "task", "length"};
  for (auto _ : state) benchmark::DoNotOptimize(pfab::pfab_advantages(m));
  state.SetItemsProcessed(state.iterations() * m.rewards.rows());
}
BENCHMARK(BM_PfabAdvantages)->Arg(1)->Arg(64);

void BM_GrpoAdvantages(benchmark::State& state) {
  std::mt19937_64 rng(3);
  pfab::GroupedRewardMatrix m;
  m.rewards = random_rewards(rng, 64 * 8, 3);
  for (Eigen::Index i = 0; i < m.rewards.rows(); ++i) m.groups.push_back(i / 8);
  m.objective_names = {"format", "task", "length"};
  for (auto _ : state) benchmark::DoNotOptimize(pfab::grpo_advantages(m));
  state.SetItemsProcessed(state.iterations() * m.rewards.rows());
}
BENCHMARK(BM_GrpoAdvantages);

void BM_ScoreRecord(benchmark::State& state) {
  pfab::RecordInput r;
  r.id = "bench";
  r.response_text = pfab::render_response(
      "two people talk, one leaves",
      "Global Search, Causal Verification, Final Alignment, Antecedent, Visual Verification, "
      "Consequence",
      "The event spans [12.5, 20.0] and 31 to 40.");
  r.gt_segments = std::vector<pfab::TimeSegment>{{12.0, 21.0}, {30.0, 41.0}};
  const pfab::RewardConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(pfab::score_record(r, cfg));
}
BENCHMARK(BM_ScoreRecord);

void BM_TrainStep(benchmark::State& state) {
  const auto engine = state.range(0) == 0 ? pfab::sim::Engine::kPfab : pfab::sim::Engine::kGrpo;
  const auto env = pfab::sim::build_env({pfab::sim::Preset::kAnticorrelated, 4, 8, 3}, 0);
  pfab::sim::TrainConfig cfg;
  cfg.engine = engine;
  auto policy = pfab::sim::PolicyTable::uniform(env.prompts(), env.candidates());
  std::size_t step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(pfab::sim::train_step(policy, env, cfg, step++));
  state.SetLabel(pfab::sim::engine_name(engine));
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
