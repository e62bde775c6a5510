#ifndef PFAB_SIMULATOR_HPP_
#define PFAB_SIMULATOR_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pfab/advantage.hpp"

namespace pfab::sim {

enum class Preset { kAnticorrelated, kSparseVsDense };

Preset parse_preset(const std::string& name);
std::string preset_name(Preset preset);

struct EnvConfig {
  Preset preset = Preset::kAnticorrelated;
  std::size_t prompts = 4;
  std::size_t candidates = 8;
  std::size_t objectives = 2;
};

/// Contextual bandit: every prompt offers `candidates` fixed responses, each
/// with an M-dimensional reward.
class SyntheticEnv {
 public:
  SyntheticEnv(std::size_t prompts, std::size_t candidates,
               std::vector<std::string> objective_names, std::vector<double> rewards,
               std::uint64_t seed);

  std::size_t prompts() const { return prompts_; }
  std::size_t candidates() const { return candidates_; }
  std::size_t objectives() const { return names_.size(); }
  const std::vector<std::string>& objective_names() const { return names_; }
  std::uint64_t seed() const { return seed_; }

  double reward(std::size_t prompt, std::size_t candidate, std::size_t objective) const {
    return rewards_[(prompt * candidates_ + candidate) * names_.size() + objective];
  }
  /// K x M reward table of one prompt.
  Eigen::MatrixXd prompt_rewards(std::size_t prompt) const;
  const std::vector<double>& raw() const { return rewards_; }

 private:
  std::size_t prompts_;
  std::size_t candidates_;
  std::vector<std::string> names_;
  std::vector<double> rewards_;
  std::uint64_t seed_;
};

/// Deterministic in `seed`. Throws std::invalid_argument when K < 2, M < 2,
/// P < 1, or the preset cannot honour its construction (sparse-vs-dense
/// needs K >= 5 so that a single positive stays within 20% of candidates).
SyntheticEnv build_env(const EnvConfig& config, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Generator for (seed, step, prompt); independent streams per key.
std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t prompt);

struct PolicyTable {
  Eigen::MatrixXd logits;            // P x K
  Eigen::MatrixXd reference_logits;  // frozen copy anchoring the KL penalty

  static PolicyTable uniform(std::size_t prompts, std::size_t candidates);
  Eigen::VectorXd probabilities(std::size_t prompt) const;
  Eigen::VectorXd log_probabilities(std::size_t prompt) const;
  Eigen::VectorXd reference_probabilities(std::size_t prompt) const;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

struct GroupSample {
  std::vector<std::size_t> candidates;
  std::vector<double> old_log_probs;
};

/// `g` independent draws from softmax(logits[prompt]) by inverse CDF.
GroupSample sample_group(const PolicyTable& policy, std::size_t prompt, std::size_t g,
                         std::mt19937_64& rng);

/// -(1/N) sum_i [min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i) - beta kl].
double surrogate_loss(const std::vector<double>& ratios, const std::vector<double>& advantages,
                      double clip_eps, double kl, double beta);

/// KL(p || q) for categorical distributions. Throws std::invalid_argument
/// when q vanishes where p does not.
double exact_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

enum class Engine { kPfab, kGrpo };

Engine parse_engine(const std::string& name);
std::string engine_name(Engine engine);

struct TrainConfig {
  std::size_t group_size = 8;
  double clip_eps = 0.2;
  double kl_beta = 0.04;
  double learning_rate = 0.05;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  Engine engine = Engine::kPfab;
  std::vector<double> grpo_weights;  // empty = uniform
  AdvantageParams advantage;
  SolverParams solver;

  void validate() const;
};

/// Samples, advantages and old log-probs for one sampling round; enough to
/// evaluate the surrogate at any logits.
struct Batch {
  std::vector<std::size_t> prompt;     // per sample
  std::vector<std::size_t> candidate;  // per sample
  std::vector<double> old_log_prob;    // per sample
  Eigen::VectorXd advantages;
  std::size_t size() const { return prompt.size(); }
};

/// Surrogate loss of `logits` on a fixed batch, KL averaged over all prompts.
double batch_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& reference_logits,
                  const Batch& batch, double clip_eps, double beta);

/// Analytic gradient of batch_loss with respect to the logits. Inside the
/// active clipped branch the ratio term contributes nothing.
Eigen::MatrixXd batch_loss_gradient(const Eigen::MatrixXd& logits,
                                    const Eigen::MatrixXd& reference_logits,
                                    const Batch& batch, double clip_eps, double beta);

struct StepRecord {
  std::size_t step = 0;
  std::vector<double> mean_reward;  // expected reward per objective, post-update
  double min_objective_mean = 0.0;
  double residual_mean = 0.0;
  std::vector<double> alpha_mean;
  double kl = 0.0;    // mean KL to the reference policy, post-update
  double loss = 0.0;  // surrogate at the sampling policy
  // Every prompt's most likely candidate is on the oracle Pareto front.
  bool mode_on_front = false;
};

struct TrainingTrace {
  Engine engine = Engine::kPfab;
  std::vector<std::string> objective_names;
  std::vector<StepRecord> steps;
};

/// Per-prompt expected reward of each objective under the current policy,
/// averaged over prompts.
std::vector<double> expected_rewards(const PolicyTable& policy, const SyntheticEnv& env);

/// Per prompt, the candidate indices no other candidate weakly dominates
/// with one strict improvement. Duplicates are kept.
std::vector<std::vector<std::size_t>> pareto_front_oracle(const SyntheticEnv& env);

struct StepResult {
  StepRecord record;
  Batch batch;
};

/// One sampling round plus one gradient step; `policy` is updated in place.
StepResult train_step(PolicyTable& policy, const SyntheticEnv& env, const TrainConfig& cfg,
                      std::size_t step);

TrainingTrace run_experiment(const TrainConfig& cfg, const SyntheticEnv& env,
                             PolicyTable* final_policy = nullptr);

struct ExperimentSummary {
  std::vector<double> final_mean_rewards;  // under the final policy
  double min_objective_mean = 0.0;
  // Mean residual over the last ceil(10%) of steps; nullopt for an empty trace.
  std::optional<double> residual_mean_last10pct;
  // Fraction of steps whose record has mode_on_front set.
  std::optional<double> front_fraction;
};

ExperimentSummary summarize(const TrainingTrace& trace, const PolicyTable& final_policy,
                            const SyntheticEnv& env);

/// `step,engine,mean_r_<name>...,min_obj_mean,residual_mean,alpha_<name>...,kl,loss`,
/// numbers printed with 9 significant digits.
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);

/// printf("%.9g") with negative zero folded to zero.
std::string format_g9(double value);

}  // namespace pfab::sim

#endif  // PFAB_SIMULATOR_HPP_
