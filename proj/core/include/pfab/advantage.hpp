#ifndef PFAB_ADVANTAGE_HPP_
#define PFAB_ADVANTAGE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pfab/minnorm.hpp"

namespace pfab {

using GroupId = std::int64_t;

/// N x M rewards with one group id per row.
struct GroupedRewardMatrix {
  Eigen::MatrixXd rewards;
  std::vector<GroupId> groups;
  std::vector<std::string> objective_names;

  Eigen::Index samples() const { return rewards.rows(); }
  Eigen::Index objectives() const { return rewards.cols(); }

  /// Throws std::invalid_argument on shape mismatch, N == 0, M == 0 or
  /// non-finite rewards.
  void validate() const;
  /// Distinct group ids with their row indices, in order of first appearance.
  std::vector<std::pair<GroupId, std::vector<Eigen::Index>>> group_rows() const;
};

struct AdvantageParams {
  // Columns with population std <= tau drop out of the min-norm problem.
  double tau = 1e-6;
  // Guard in the final normalization (x - mean) / (std + eps).
  double eps = 1e-12;

  void validate() const;
};

struct GrpoParams {
  // Empty means uniform. Normalized to sum to one before use.
  std::vector<double> weights;
  double eps = 1e-12;

  Eigen::VectorXd resolved_weights(Eigen::Index objectives) const;
};

struct AdvantageVector {
  Eigen::VectorXd values;
  std::map<GroupId, SimplexWeights> weights;
  std::map<GroupId, double> residual;
  // Groups whose weights came from the uniform fallback (no valid objective).
  std::vector<GroupId> degenerate_groups;
  std::vector<std::string> diagnostics;
};

struct Standardization {
  StandardizedDeltas deltas;
  Eigen::VectorXd sigma;  // population std of every centered column
  std::vector<std::size_t> valid;
};

/// Population mean and std of a vector.
double population_mean(const Eigen::Ref<const Eigen::VectorXd>& v);
double population_std(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Subtracts the per-group column means. Constant columns center to exact
/// zeros.
Eigen::MatrixXd center_rewards(const GroupedRewardMatrix& m);

/// Keeps the columns of a centered block with std > tau, each divided by its
/// std.
Standardization standardize(const Eigen::MatrixXd& centered_group, double tau);

AdvantageVector pfab_advantages(const GroupedRewardMatrix& m,
                                const AdvantageParams& params = {},
                                const SolverParams& solver = {});

AdvantageVector grpo_advantages(const GroupedRewardMatrix& m, const GrpoParams& params = {});

struct ResidualReport {
  double residual = 0.0;
  bool degenerate = false;
};

/// Min-norm residual per group in the standardized space. Zero means the
/// origin lies in the convex hull of the group's standardized columns.
std::map<GroupId, ResidualReport> pareto_residual(const GroupedRewardMatrix& m,
                                                  const AdvantageParams& params = {},
                                                  const SolverParams& solver = {});

}  // namespace pfab

#endif  // PFAB_ADVANTAGE_HPP_
