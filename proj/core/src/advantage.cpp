#include "pfab/advantage.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pfab {

namespace {

// Centers v in place; an exactly constant vector becomes exact zeros.
void center_in_place(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  if ((v.array() == v[0]).all()) {
    v.setZero();
    return;
  }
  v.array() -= population_mean(v);
}

Eigen::VectorXd normalize(Eigen::VectorXd raw, double eps) {
  center_in_place(raw);
  const double sd = population_std(raw);
  return raw / (sd + eps);
}

Eigen::MatrixXd group_block(const Eigen::MatrixXd& full, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), full.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    block.row(static_cast<Eigen::Index>(r)) = full.row(rows[r]);
  }
  return block;
}

SimplexWeights uniform_weights(Eigen::Index objectives) {
  SimplexWeights w;
  w.weights = Eigen::VectorXd::Constant(objectives, 1.0 / static_cast<double>(objectives));
  w.converged = true;
  return w;
}

std::string singleton_warning(GroupId id) {
  return "group " + std::to_string(id) + " has a single sample; advantages set to zero";
}

}  // namespace

void GroupedRewardMatrix::validate() const {
  if (rewards.rows() < 1 || rewards.cols() < 1) {
    throw std::invalid_argument("reward matrix needs at least one row and one objective");
  }
  if (static_cast<Eigen::Index>(groups.size()) != rewards.rows()) {
    throw std::invalid_argument("group vector length does not match reward rows");
  }
  if (!objective_names.empty() &&
      static_cast<Eigen::Index>(objective_names.size()) != rewards.cols()) {
    throw std::invalid_argument("objective name count does not match reward columns");
  }
  if (!rewards.allFinite()) throw std::invalid_argument("rewards must be finite");
}

std::vector<std::pair<GroupId, std::vector<Eigen::Index>>> GroupedRewardMatrix::group_rows()
    const {
  std::vector<std::pair<GroupId, std::vector<Eigen::Index>>> out;
  std::unordered_map<GroupId, std::size_t> slot;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(groups.size()); ++i) {
    const auto id = groups[static_cast<std::size_t>(i)];
    auto [it, inserted] = slot.try_emplace(id, out.size());
    if (inserted) out.push_back({id, {}});
    out[it->second].second.push_back(i);
  }
  return out;
}

void AdvantageParams::validate() const {
  if (!(tau > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("advantage parameters tau and eps must be positive");
  }
}

Eigen::VectorXd GrpoParams::resolved_weights(Eigen::Index objectives) const {
  if (!(eps > 0.0)) throw std::invalid_argument("grpo eps must be positive");
  if (weights.empty()) {
    return Eigen::VectorXd::Constant(objectives, 1.0 / static_cast<double>(objectives));
  }
  if (static_cast<Eigen::Index>(weights.size()) != objectives) {
    throw std::invalid_argument("grpo weight count does not match objective count");
  }
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), objectives);
  if (!w.allFinite() || (w.array() < 0.0).any() || !(w.sum() > 0.0)) {
    throw std::invalid_argument("grpo weights must be nonnegative with a positive sum");
  }
  return w / w.sum();
}

double population_mean(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.size() == 0 ? 0.0 : v.mean();
}

double population_std(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return 0.0;
  const double mu = v.mean();
  return std::sqrt((v.array() - mu).square().mean());
}

Eigen::MatrixXd center_rewards(const GroupedRewardMatrix& m) {
  m.validate();
  Eigen::MatrixXd centered = m.rewards;
  for (const auto& [id, rows] : m.group_rows()) {
    Eigen::MatrixXd block = group_block(m.rewards, rows);
    for (Eigen::Index c = 0; c < block.cols(); ++c) center_in_place(block.col(c));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      centered.row(rows[r]) = block.row(static_cast<Eigen::Index>(r));
    }
  }
  return centered;
}

Standardization standardize(const Eigen::MatrixXd& centered_group, double tau) {
  Standardization out;
  const auto cols = centered_group.cols();
  out.sigma.resize(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    out.sigma[c] = population_std(centered_group.col(c));
    if (out.sigma[c] > tau) out.valid.push_back(static_cast<std::size_t>(c));
  }
  out.deltas.total_objectives = static_cast<std::size_t>(cols);
  out.deltas.columns = out.valid;
  out.deltas.matrix.resize(centered_group.rows(), static_cast<Eigen::Index>(out.valid.size()));
  for (std::size_t j = 0; j < out.valid.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(out.valid[j]);
    out.deltas.matrix.col(static_cast<Eigen::Index>(j)) = centered_group.col(c) / out.sigma[c];
  }
  return out;
}

AdvantageVector pfab_advantages(const GroupedRewardMatrix& m, const AdvantageParams& params,
                                const SolverParams& solver) {
  params.validate();
  const Eigen::MatrixXd centered = center_rewards(m);
  AdvantageVector out;
  out.values = Eigen::VectorXd::Zero(m.samples());

  for (const auto& [id, rows] : m.group_rows()) {
    if (rows.size() == 1) out.diagnostics.push_back(singleton_warning(id));
    const Eigen::MatrixXd block = group_block(centered, rows);
    const auto st = standardize(block, params.tau);

    SimplexWeights sw;
    if (st.valid.empty()) {
      sw = uniform_weights(m.objectives());
      out.degenerate_groups.push_back(id);
    } else {
      sw = min_norm_weights(st.deltas, solver);
    }

    const Eigen::VectorXd advantages = normalize(block * sw.weights, params.eps);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.values[rows[r]] = advantages[static_cast<Eigen::Index>(r)];
    }
    out.residual[id] = sw.residual;
    out.weights[id] = std::move(sw);
  }
  return out;
}

AdvantageVector grpo_advantages(const GroupedRewardMatrix& m, const GrpoParams& params) {
  m.validate();
  const Eigen::VectorXd w = params.resolved_weights(m.objectives());
  const Eigen::VectorXd totals = m.rewards * w;
  AdvantageVector out;
  out.values = Eigen::VectorXd::Zero(m.samples());

  for (const auto& [id, rows] : m.group_rows()) {
    if (rows.size() == 1) out.diagnostics.push_back(singleton_warning(id));
    Eigen::VectorXd group_totals(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      group_totals[static_cast<Eigen::Index>(r)] = totals[rows[r]];
    }
    const Eigen::VectorXd advantages = normalize(std::move(group_totals), params.eps);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.values[rows[r]] = advantages[static_cast<Eigen::Index>(r)];
    }
    SimplexWeights sw;
    sw.weights = w;
    sw.converged = true;
    out.weights[id] = std::move(sw);
  }
  return out;
}

std::map<GroupId, ResidualReport> pareto_residual(const GroupedRewardMatrix& m,
                                                  const AdvantageParams& params,
                                                  const SolverParams& solver) {
  params.validate();
  const Eigen::MatrixXd centered = center_rewards(m);
  std::map<GroupId, ResidualReport> out;
  for (const auto& [id, rows] : m.group_rows()) {
    const auto st = standardize(group_block(centered, rows), params.tau);
    if (st.valid.empty()) {
      out[id] = {0.0, true};
    } else {
      out[id] = {min_norm_weights(st.deltas, solver).residual, false};
    }
  }
  return out;
}

}  // namespace pfab
