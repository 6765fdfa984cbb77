#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "beware/core.hpp"
#include "beware/factorization.hpp"

namespace beware {

/// The chosen item and how its score splits into estimate and optimism.
struct Selection {
  std::size_t item = 0;
  double score = 0.0;
  double exploit_term = 0.0;
  double bonus_term = 0.0;
};

/// Pull counts and empirical means for UCB1, pooled over all users.
class UcbArmStats {
 public:
  UcbArmStats() = default;
  explicit UcbArmStats(std::size_t n_arms) : pulls_(n_arms, 0), means_(n_arms, 0.0) {}

  std::size_t n_arms() const noexcept { return pulls_.size(); }
  std::size_t total_pulls() const noexcept { return total_; }
  std::size_t pulls(std::size_t arm) const { return pulls_.at(arm); }
  double mean(std::size_t arm) const { return means_.at(arm); }

  /// Incremental running mean. Grows the arm table if `arm` is new.
  void update(std::size_t arm, double reward);

  /// Directly sets an arm's statistics (used to build test scenarios).
  void set(std::size_t arm, std::size_t pulls, double mean);

 private:
  std::vector<std::size_t> pulls_;
  std::vector<double> means_;
  std::size_t total_ = 0;
};

// All selectors break ties in favour of the smallest item index and throw
// EmptyAllowedSet when `allowed` is empty.

/// argmax of U_i . V_j over the allowed items.
Selection greedy_select(const FactorModel& model, std::size_t user,
                        std::span<const std::size_t> allowed);

/// UCB1: untried arms first (lowest index), then mean + sqrt(2 ln t / t_j).
Selection ucb1_select(const UcbArmStats& stats, std::span<const std::size_t> allowed);

/// Optimism over the user's confidence ellipsoid:
///   U_i . V_j + alpha * sqrt(V_j A^{-1} V_j^T),
/// A = V_J^T V_J + lambda * w * Id over the user's rated items. Expects a model
/// whose last half step solved U with V fixed. Throws SingularSystem when
/// alpha != 0 and A is not positive definite.
Selection beware_user_select(const RatingMatrix& ratings, const FactorModel& model,
                             std::size_t user, double lambda, double alpha,
                             std::span<const std::size_t> allowed,
                             Regularization reg = Regularization::Weighted);

/// Optimism over each item's confidence ellipsoid:
///   U_i . V_j + alpha * sqrt(U_i B(j)^{-1} U_i^T),
/// B(j) = U_I^T U_I + lambda * w * Id over the item's raters. Expects a model
/// whose last half step solved V with U fixed.
Selection beware_item_select(const RatingMatrix& ratings, const FactorModel& model,
                             std::size_t user, double lambda, double alpha,
                             std::span<const std::size_t> allowed,
                             Regularization reg = Regularization::Weighted);

/// sqrt(w M^{-1} w^T) for symmetric positive definite M.
double ellipsoid_width(const Eigen::MatrixXd& design, const Eigen::VectorXd& probe);

}  // namespace beware
