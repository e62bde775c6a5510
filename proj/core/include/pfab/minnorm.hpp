#ifndef PFAB_MINNORM_HPP_
#define PFAB_MINNORM_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace pfab {

/// Centered, column-standardized group block restricted to the valid
/// objectives. `columns[j]` is the original objective index of column j and
/// `total_objectives` the width of the unrestricted reward matrix.
struct StandardizedDeltas {
  Eigen::MatrixXd matrix;
  std::vector<std::size_t> columns;
  std::size_t total_objectives = 0;

  /// Every column kept, labels 0..cols-1.
  static StandardizedDeltas from_matrix(Eigen::MatrixXd matrix);
};

struct SimplexWeights {
  Eigen::VectorXd weights;  // length total_objectives
  double residual = 0.0;    // ||D_hat alpha||^2
  std::size_t iterations = 0;
  bool converged = false;
};

struct SolverParams {
  std::size_t max_iter = 50;
  double tol = 1e-6;
  double line_search_guard = 1e-12;

  void validate() const;
};

/// ||D_hat alpha||^2, alpha given over the valid columns.
double objective(const StandardizedDeltas& d_hat, const Eigen::VectorXd& alpha);

/// Index of the smallest gradient entry; ties go to the smallest index.
std::size_t lmo(const Eigen::VectorXd& gradient);

/// Closed-form step along `step_dir` = D_hat d, clamped to [0, 1]. Returns
/// nullopt when ||step_dir||^2 < guard (the solver stops early).
std::optional<double> exact_line_search(const Eigen::VectorXd& current_dir,
                                        const Eigen::VectorXd& step_dir, double guard);

/// Called with each iterate (over the valid columns), starting from the
/// uniform point.
using IterateObserver = std::function<void(const Eigen::VectorXd& alpha)>;

/// Frank-Wolfe with exact line search over the simplex, started from the
/// uniform point. Weights come back re-embedded at full width with zeros
/// outside `d_hat.columns`.
SimplexWeights min_norm_weights(const StandardizedDeltas& d_hat,
                                const SolverParams& params = {},
                                const IterateObserver& observer = {});

}  // namespace pfab

#endif  // PFAB_MINNORM_HPP_
