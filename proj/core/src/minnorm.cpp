#include "pfab/minnorm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pfab {

StandardizedDeltas StandardizedDeltas::from_matrix(Eigen::MatrixXd matrix) {
  StandardizedDeltas d;
  d.columns.resize(static_cast<std::size_t>(matrix.cols()));
  std::iota(d.columns.begin(), d.columns.end(), std::size_t{0});
  d.total_objectives = d.columns.size();
  d.matrix = std::move(matrix);
  return d;
}

void SolverParams::validate() const {
  if (max_iter == 0 || !(tol > 0.0) || !(line_search_guard > 0.0)) {
    throw std::invalid_argument("solver parameters must be positive");
  }
}

double objective(const StandardizedDeltas& d_hat, const Eigen::VectorXd& alpha) {
  if (alpha.size() != d_hat.matrix.cols()) {
    throw std::invalid_argument("objective: alpha length does not match column count");
  }
  return (d_hat.matrix * alpha).squaredNorm();
}

std::size_t lmo(const Eigen::VectorXd& gradient) {
  if (gradient.size() == 0) throw std::invalid_argument("lmo: empty gradient");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < gradient.size(); ++i) {
    if (gradient[i] < gradient[best]) best = i;
  }
  return static_cast<std::size_t>(best);
}

std::optional<double> exact_line_search(const Eigen::VectorXd& current_dir,
                                        const Eigen::VectorXd& step_dir, double guard) {
  if (current_dir.size() != step_dir.size()) {
    throw std::invalid_argument("exact_line_search: length mismatch");
  }
  const double denom = step_dir.squaredNorm();
  if (denom < guard) return std::nullopt;
  return std::clamp(-current_dir.dot(step_dir) / denom, 0.0, 1.0);
}

SimplexWeights min_norm_weights(const StandardizedDeltas& d_hat, const SolverParams& params,
                                const IterateObserver& observer) {
  params.validate();
  const auto& D = d_hat.matrix;
  const auto valid = D.cols();
  if (valid < 1) throw std::invalid_argument("min_norm_weights: no valid objectives");
  if (static_cast<std::size_t>(valid) != d_hat.columns.size() ||
      d_hat.total_objectives < d_hat.columns.size()) {
    throw std::invalid_argument("min_norm_weights: inconsistent column labels");
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(valid, 1.0 / static_cast<double>(valid));
  if (observer) observer(alpha);

  SimplexWeights result;
  if (valid == 1) {
    result.converged = true;
  } else {
    Eigen::VectorXd direction(valid);
    for (std::size_t t = 0; t < params.max_iter; ++t) {
      const Eigen::VectorXd current = D * alpha;
      const Eigen::VectorXd gradient = 2.0 * (D.transpose() * current);
      const auto vertex = static_cast<Eigen::Index>(lmo(gradient));

      direction = -alpha;
      direction[vertex] += 1.0;
      const Eigen::VectorXd step_dir = D * direction;
      const auto gamma = exact_line_search(current, step_dir, params.line_search_guard);
      if (!gamma) {
        result.converged = true;
        break;
      }

      alpha += *gamma * direction;
      ++result.iterations;
      if (observer) observer(alpha);
      if (*gamma * direction.norm() < params.tol) {
        result.converged = true;
        break;
      }
    }
  }

  result.residual = (D * alpha).squaredNorm();
  result.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_hat.total_objectives));
  for (Eigen::Index j = 0; j < valid; ++j) {
    result.weights[static_cast<Eigen::Index>(d_hat.columns[static_cast<std::size_t>(j)])] =
        alpha[j];
  }
  return result;
}

}  // namespace pfab
