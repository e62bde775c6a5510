#include "pfab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace pfab::sim {

namespace {

constexpr int kMaxEnvAttempts = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
  }
  return idx;
}

double column_correlation(const Eigen::MatrixXd& table, Eigen::Index a, Eigen::Index b) {
  const Eigen::VectorXd x = table.col(a).array() - table.col(a).mean();
  const Eigen::VectorXd y = table.col(b).array() - table.col(b).mean();
  const double denom = x.norm() * y.norm();
  return denom > 0.0 ? x.dot(y) / denom : 0.0;
}

// True when no single candidate attains the maximum of every column.
bool has_conflict(const Eigen::MatrixXd& table) {
  const Eigen::RowVectorXd best = table.colwise().maxCoeff();
  for (Eigen::Index k = 0; k < table.rows(); ++k) {
    if ((table.row(k).array() >= best.array()).all()) return false;
  }
  return true;
}

bool pairwise_anticorrelated(const Eigen::MatrixXd& table) {
  for (Eigen::Index a = 0; a < table.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < table.cols(); ++b) {
      if (!(column_correlation(table, a, b) < 0.0)) return false;
    }
  }
  return true;
}

// Candidates share a random budget s in [0.1, 1] split across objectives;
// with two objectives the split fraction is stratified over candidates.
Eigen::MatrixXd anticorrelated_prompt(std::size_t k, std::size_t m, std::mt19937_64& rng) {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  const auto order = shuffled_indices(k, rng);
  for (std::size_t c = 0; c < k; ++c) {
    const double budget = 0.1 + 0.9 * uniform01(rng);
    Eigen::VectorXd split(static_cast<Eigen::Index>(m));
    if (m == 2) {
      const double t = (static_cast<double>(order[c]) + uniform01(rng)) / static_cast<double>(k);
      split << t, 1.0 - t;
    } else {
      for (Eigen::Index j = 0; j < split.size(); ++j) split[j] = -std::log1p(-uniform01(rng));
      split /= split.sum();
    }
    table.row(static_cast<Eigen::Index>(c)) = budget * split.transpose();
  }
  return table;
}

// One binary objective with floor(0.2 K) positives; the remaining objectives
// are wide continuous rewards that are low exactly where the sparse one fires.
Eigen::MatrixXd sparse_dense_prompt(std::size_t k, std::size_t m, std::mt19937_64& rng) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                static_cast<Eigen::Index>(m));
  const auto positives = k / 5;
  const auto order = shuffled_indices(k, rng);
  for (std::size_t c = 0; c < k; ++c) {
    const bool positive = order[c] < positives;
    const auto row = static_cast<Eigen::Index>(c);
    table(row, 0) = positive ? 1.0 : 0.0;
    for (Eigen::Index j = 1; j < table.cols(); ++j) {
      table(row, j) = positive ? 0.6 * uniform01(rng) : 0.4 + 1.6 * uniform01(rng);
    }
  }
  return table;
}

Eigen::Index mode_of(const Eigen::MatrixXd& logits, Eigen::Index prompt) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < logits.cols(); ++k) {
    if (logits(prompt, k) > logits(prompt, best)) best = k;
  }
  return best;
}

// KL(softmax(z) || softmax(z_ref)) from log-probabilities.
double kl_from_logits(const Eigen::VectorXd& logits, const Eigen::VectorXd& reference) {
  const Eigen::VectorXd logp = log_softmax(logits);
  const Eigen::VectorXd logq = log_softmax(reference);
  double kl = 0.0;
  for (Eigen::Index j = 0; j < logp.size(); ++j) {
    const double p = std::exp(logp[j]);
    if (p > 0.0) kl += p * (logp[j] - logq[j]);
  }
  return std::max(kl, 0.0);
}

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "anticorrelated") return Preset::kAnticorrelated;
  if (name == "sparse-vs-dense") return Preset::kSparseVsDense;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::string preset_name(Preset preset) {
  return preset == Preset::kAnticorrelated ? "anticorrelated" : "sparse-vs-dense";
}

Engine parse_engine(const std::string& name) {
  if (name == "pfab") return Engine::kPfab;
  if (name == "grpo") return Engine::kGrpo;
  throw std::invalid_argument("unknown engine '" + name + "'");
}

std::string engine_name(Engine engine) { return engine == Engine::kPfab ? "pfab" : "grpo"; }

SyntheticEnv::SyntheticEnv(std::size_t prompts, std::size_t candidates,
                           std::vector<std::string> objective_names, std::vector<double> rewards,
                           std::uint64_t seed)
    : prompts_(prompts),
      candidates_(candidates),
      names_(std::move(objective_names)),
      rewards_(std::move(rewards)),
      seed_(seed) {
  if (rewards_.size() != prompts_ * candidates_ * names_.size()) {
    throw std::invalid_argument("reward table size does not match P x K x M");
  }
  for (double r : rewards_) {
    if (!std::isfinite(r)) throw std::invalid_argument("rewards must be finite");
  }
}

Eigen::MatrixXd SyntheticEnv::prompt_rewards(std::size_t prompt) const {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(candidates_),
                        static_cast<Eigen::Index>(objectives()));
  for (std::size_t k = 0; k < candidates_; ++k) {
    for (std::size_t m = 0; m < objectives(); ++m) {
      table(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = reward(prompt, k, m);
    }
  }
  return table;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t prompt) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ step) ^ prompt);
  return std::mt19937_64(key);
}

SyntheticEnv build_env(const EnvConfig& config, std::uint64_t seed) {
  const auto p = config.prompts;
  const auto k = config.candidates;
  const auto m = config.objectives;
  if (p < 1) throw std::invalid_argument("environment needs at least one prompt");
  if (k < 2) throw std::invalid_argument("environment needs at least two candidates");
  if (m < 2) throw std::invalid_argument("environment needs at least two objectives");
  if (config.preset == Preset::kSparseVsDense && k < 5) {
    throw std::invalid_argument("sparse-vs-dense preset needs at least five candidates");
  }

  std::vector<std::string> names;
  if (config.preset == Preset::kSparseVsDense) {
    names.emplace_back("sparse");
    for (std::size_t j = 1; j < m; ++j) {
      names.push_back(j == 1 ? std::string("dense") : "dense" + std::to_string(j));
    }
  } else {
    for (std::size_t j = 0; j < m; ++j) names.push_back("obj" + std::to_string(j));
  }

  std::vector<double> rewards;
  rewards.reserve(p * k * m);
  for (std::size_t prompt = 0; prompt < p; ++prompt) {
    auto rng = keyed_rng(seed, ~std::uint64_t{0}, prompt);
    Eigen::MatrixXd table;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxEnvAttempts) {
        throw std::invalid_argument("could not draw a conflicting prompt for this preset");
      }
      if (config.preset == Preset::kAnticorrelated) {
        table = anticorrelated_prompt(k, m, rng);
        if (pairwise_anticorrelated(table) && has_conflict(table)) break;
      } else {
        table = sparse_dense_prompt(k, m, rng);
        if (has_conflict(table)) break;
      }
    }
    for (Eigen::Index c = 0; c < table.rows(); ++c) {
      for (Eigen::Index j = 0; j < table.cols(); ++j) rewards.push_back(table(c, j));
    }
  }
  return SyntheticEnv(p, k, std::move(names), std::move(rewards), seed);
}

PolicyTable PolicyTable::uniform(std::size_t prompts, std::size_t candidates) {
  PolicyTable policy;
  policy.logits = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(prompts),
                                        static_cast<Eigen::Index>(candidates));
  policy.reference_logits = policy.logits;
  return policy;
}

Eigen::VectorXd PolicyTable::probabilities(std::size_t prompt) const {
  return softmax(logits.row(static_cast<Eigen::Index>(prompt)).transpose());
}

Eigen::VectorXd PolicyTable::log_probabilities(std::size_t prompt) const {
  return log_softmax(logits.row(static_cast<Eigen::Index>(prompt)).transpose());
}

Eigen::VectorXd PolicyTable::reference_probabilities(std::size_t prompt) const {
  return softmax(reference_logits.row(static_cast<Eigen::Index>(prompt)).transpose());
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return logits.array() - lse;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

GroupSample sample_group(const PolicyTable& policy, std::size_t prompt, std::size_t g,
                         std::mt19937_64& rng) {
  if (g < 2) throw std::invalid_argument("sample_group: group size must be at least 2");
  const Eigen::VectorXd probs = policy.probabilities(prompt);
  const Eigen::VectorXd log_probs = policy.log_probabilities(prompt);
  Eigen::Index last_positive = 0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) last_positive = k;
  }

  GroupSample sample;
  sample.candidates.reserve(g);
  sample.old_log_probs.reserve(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    Eigen::Index chosen = last_positive;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
      cumulative += probs[k];
      if (u < cumulative && probs[k] > 0.0) {
        chosen = k;
        break;
      }
    }
    sample.candidates.push_back(static_cast<std::size_t>(chosen));
    sample.old_log_probs.push_back(log_probs[chosen]);
  }
  return sample;
}

double surrogate_loss(const std::vector<double>& ratios, const std::vector<double>& advantages,
                      double clip_eps, double kl, double beta) {
  if (ratios.size() != advantages.size() || ratios.empty()) {
    throw std::invalid_argument("surrogate_loss: ratios and advantages must match and be nonempty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0)) throw std::invalid_argument("surrogate_loss: ratios must be positive");
    const double clipped = std::clamp(ratios[i], 1.0 - clip_eps, 1.0 + clip_eps);
    total += std::min(ratios[i] * advantages[i], clipped * advantages[i]) - beta * kl;
  }
  return -total / static_cast<double>(ratios.size());
}

double exact_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("exact_kl: length mismatch");
  double kl = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    if (!(q[j] > 0.0)) throw std::invalid_argument("exact_kl: q has no mass where p does");
    kl += p[j] * std::log(p[j] / q[j]);
  }
  return std::max(kl, 0.0);
}

void TrainConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("group_size must be at least 2");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw std::invalid_argument("clip_eps must lie in (0, 1)");
  if (!(kl_beta >= 0.0) || !std::isfinite(kl_beta)) {
    throw std::invalid_argument("kl_beta must be nonnegative");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  advantage.validate();
  solver.validate();
}

double batch_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& reference_logits,
                  const Batch& batch, double clip_eps, double beta) {
  const auto prompts = logits.rows();
  std::vector<Eigen::VectorXd> log_probs(static_cast<std::size_t>(prompts));
  double kl = 0.0;
  for (Eigen::Index p = 0; p < prompts; ++p) {
    log_probs[static_cast<std::size_t>(p)] = log_softmax(logits.row(p).transpose());
    kl += kl_from_logits(logits.row(p).transpose(), reference_logits.row(p).transpose());
  }
  kl /= static_cast<double>(prompts);

  std::vector<double> ratios(batch.size());
  std::vector<double> advantages(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& lp = log_probs[batch.prompt[i]];
    ratios[i] = std::exp(lp[static_cast<Eigen::Index>(batch.candidate[i])] - batch.old_log_prob[i]);
    advantages[i] = batch.advantages[static_cast<Eigen::Index>(i)];
  }
  return surrogate_loss(ratios, advantages, clip_eps, kl, beta);
}

Eigen::MatrixXd batch_loss_gradient(const Eigen::MatrixXd& logits,
                                    const Eigen::MatrixXd& reference_logits,
                                    const Batch& batch, double clip_eps, double beta) {
  const auto prompts = logits.rows();
  const double n = static_cast<double>(batch.size());
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());

  std::vector<Eigen::VectorXd> probs(static_cast<std::size_t>(prompts));
  std::vector<Eigen::VectorXd> log_probs(static_cast<std::size_t>(prompts));
  for (Eigen::Index p = 0; p < prompts; ++p) {
    const Eigen::VectorXd logp = log_softmax(logits.row(p).transpose());
    const Eigen::VectorXd logq = log_softmax(reference_logits.row(p).transpose());
    const Eigen::VectorXd prob = logp.array().exp();
    probs[static_cast<std::size_t>(p)] = prob;
    log_probs[static_cast<std::size_t>(p)] = logp;
    if (beta == 0.0) continue;
    const double kl = (prob.array() * (logp - logq).array()).sum();
    // d KL / d z_j = p_j (log p_j - log q_j - KL), averaged over prompts.
    grad.row(p) += (beta / static_cast<double>(prompts)) *
                   (prob.array() * ((logp - logq).array() - kl)).matrix().transpose();
  }

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto p = static_cast<Eigen::Index>(batch.prompt[i]);
    const auto c = static_cast<Eigen::Index>(batch.candidate[i]);
    const auto& prob = probs[batch.prompt[i]];
    const double ratio = std::exp(log_probs[batch.prompt[i]][c] - batch.old_log_prob[i]);
    const double a = batch.advantages[static_cast<Eigen::Index>(i)];
    const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
    if (ratio * a > clipped * a) continue;  // clipped branch active
    // d rho / d z_j = rho (1[j = c] - p_j)
    Eigen::RowVectorXd dratio = -ratio * prob.transpose();
    dratio[c] += ratio;
    grad.row(p) -= (a / n) * dratio;
  }
  return grad;
}

std::vector<double> expected_rewards(const PolicyTable& policy, const SyntheticEnv& env) {
  std::vector<double> mean(env.objectives(), 0.0);
  for (std::size_t p = 0; p < env.prompts(); ++p) {
    const Eigen::VectorXd probs = policy.probabilities(p);
    const Eigen::VectorXd per_objective = env.prompt_rewards(p).transpose() * probs;
    for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += per_objective[static_cast<Eigen::Index>(m)];
  }
  for (auto& v : mean) v /= static_cast<double>(env.prompts());
  return mean;
}

std::vector<std::vector<std::size_t>> pareto_front_oracle(const SyntheticEnv& env) {
  std::vector<std::vector<std::size_t>> fronts(env.prompts());
  for (std::size_t p = 0; p < env.prompts(); ++p) {
    const Eigen::MatrixXd table = env.prompt_rewards(p);
    for (Eigen::Index a = 0; a < table.rows(); ++a) {
      bool dominated = false;
      for (Eigen::Index b = 0; b < table.rows() && !dominated; ++b) {
        if (a == b) continue;
        dominated = (table.row(b).array() >= table.row(a).array()).all() &&
                    (table.row(b).array() > table.row(a).array()).any();
      }
      if (!dominated) fronts[p].push_back(static_cast<std::size_t>(a));
    }
  }
  return fronts;
}

StepResult train_step(PolicyTable& policy, const SyntheticEnv& env, const TrainConfig& cfg,
                      std::size_t step) {
  cfg.validate();
  const auto prompts = env.prompts();
  const auto g = cfg.group_size;
  const auto m = env.objectives();
  if (static_cast<std::size_t>(policy.logits.rows()) != prompts ||
      static_cast<std::size_t>(policy.logits.cols()) != env.candidates()) {
    throw std::invalid_argument("policy shape does not match environment");
  }

  StepResult result;
  Batch& batch = result.batch;
  GroupedRewardMatrix matrix;
  matrix.rewards.resize(static_cast<Eigen::Index>(prompts * g), static_cast<Eigen::Index>(m));
  matrix.objective_names = env.objective_names();
  for (std::size_t p = 0; p < prompts; ++p) {
    auto rng = keyed_rng(cfg.seed, step, p);
    const auto sample = sample_group(policy, p, g, rng);
    for (std::size_t i = 0; i < g; ++i) {
      const auto row = static_cast<Eigen::Index>(batch.size());
      for (std::size_t j = 0; j < m; ++j) {
        matrix.rewards(row, static_cast<Eigen::Index>(j)) = env.reward(p, sample.candidates[i], j);
      }
      matrix.groups.push_back(static_cast<GroupId>(p));
      batch.prompt.push_back(p);
      batch.candidate.push_back(sample.candidates[i]);
      batch.old_log_prob.push_back(sample.old_log_probs[i]);
    }
  }

  StepRecord& record = result.record;
  record.step = step;
  record.alpha_mean.assign(m, 0.0);
  if (cfg.engine == Engine::kPfab) {
    auto adv = pfab_advantages(matrix, cfg.advantage, cfg.solver);
    batch.advantages = std::move(adv.values);
    for (const auto& [id, w] : adv.weights) {
      for (std::size_t j = 0; j < m; ++j) record.alpha_mean[j] += w.weights[static_cast<Eigen::Index>(j)];
      record.residual_mean += w.residual;
    }
  } else {
    GrpoParams params;
    params.weights = cfg.grpo_weights;
    params.eps = cfg.advantage.eps;
    auto adv = grpo_advantages(matrix, params);
    batch.advantages = std::move(adv.values);
    for (const auto& [id, w] : adv.weights) {
      for (std::size_t j = 0; j < m; ++j) record.alpha_mean[j] += w.weights[static_cast<Eigen::Index>(j)];
    }
    for (const auto& [id, report] : pareto_residual(matrix, cfg.advantage, cfg.solver)) {
      record.residual_mean += report.residual;
    }
  }
  for (auto& a : record.alpha_mean) a /= static_cast<double>(prompts);
  record.residual_mean /= static_cast<double>(prompts);

  record.loss = batch_loss(policy.logits, policy.reference_logits, batch, cfg.clip_eps, cfg.kl_beta);
  policy.logits -= cfg.learning_rate * batch_loss_gradient(policy.logits, policy.reference_logits,
                                                           batch, cfg.clip_eps, cfg.kl_beta);

  record.mean_reward = expected_rewards(policy, env);
  record.min_objective_mean = *std::min_element(record.mean_reward.begin(), record.mean_reward.end());
  double kl = 0.0;
  for (std::size_t p = 0; p < prompts; ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    kl += kl_from_logits(policy.logits.row(row).transpose(),
                         policy.reference_logits.row(row).transpose());
  }
  record.kl = kl / static_cast<double>(prompts);

  const auto fronts = pareto_front_oracle(env);
  record.mode_on_front = true;
  for (std::size_t p = 0; p < prompts; ++p) {
    const auto mode = static_cast<std::size_t>(mode_of(policy.logits, static_cast<Eigen::Index>(p)));
    if (std::find(fronts[p].begin(), fronts[p].end(), mode) == fronts[p].end()) {
      record.mode_on_front = false;
      break;
    }
  }
  return result;
}

TrainingTrace run_experiment(const TrainConfig& cfg, const SyntheticEnv& env,
                             PolicyTable* final_policy) {
  cfg.validate();
  if (!cfg.grpo_weights.empty() && cfg.grpo_weights.size() != env.objectives()) {
    throw std::invalid_argument("grpo_weights length does not match objective count");
  }
  TrainingTrace trace;
  trace.engine = cfg.engine;
  trace.objective_names = env.objective_names();
  auto policy = PolicyTable::uniform(env.prompts(), env.candidates());
  trace.steps.reserve(cfg.steps);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    trace.steps.push_back(train_step(policy, env, cfg, step).record);
  }
  if (final_policy != nullptr) *final_policy = std::move(policy);
  return trace;
}

ExperimentSummary summarize(const TrainingTrace& trace, const PolicyTable& final_policy,
                            const SyntheticEnv& env) {
  ExperimentSummary summary;
  summary.final_mean_rewards = expected_rewards(final_policy, env);
  summary.min_objective_mean =
      *std::min_element(summary.final_mean_rewards.begin(), summary.final_mean_rewards.end());
  const auto steps = trace.steps.size();
  if (steps == 0) return summary;

  const std::size_t tail = (steps + 9) / 10;
  double residual = 0.0;
  for (std::size_t i = steps - tail; i < steps; ++i) residual += trace.steps[i].residual_mean;
  summary.residual_mean_last10pct = residual / static_cast<double>(tail);

  const auto on_front = std::count_if(trace.steps.begin(), trace.steps.end(),
                                      [](const StepRecord& r) { return r.mode_on_front; });
  summary.front_fraction = static_cast<double>(on_front) / static_cast<double>(steps);
  return summary;
}

std::string format_g9(double value) {
  if (value == 0.0) value = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  out << "step,engine";
  for (const auto& name : trace.objective_names) out << ",mean_r_" << name;
  out << ",min_obj_mean,residual_mean";
  for (const auto& name : trace.objective_names) out << ",alpha_" << name;
  out << ",kl,loss\n";

  const auto engine = engine_name(trace.engine);
  for (const auto& r : trace.steps) {
    out << r.step << ',' << engine;
    for (double v : r.mean_reward) out << ',' << format_g9(v);
    out << ',' << format_g9(r.min_objective_mean) << ',' << format_g9(r.residual_mean);
    for (double v : r.alpha_mean) out << ',' << format_g9(v);
    out << ',' << format_g9(r.kl) << ',' << format_g9(r.loss) << '\n';
  }
}

}  // namespace pfab::sim
