#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include <Eigen/Core>

#include "beware/core.hpp"

namespace beware {

/// Row-major so that U_i and V_j are contiguous.
using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Which side of the factorization was solved last.
enum class HalfStep { Users, Items };

/// Estimated factors U_hat (n_users x k) and V_hat (n_items x k).
struct FactorModel {
  FactorMatrix user_factors;
  FactorMatrix item_factors;
  FitConfig config;
  double last_objective = 0.0;
  std::size_t sweeps_run = 0;
  HalfStep last_half_step = HalfStep::Users;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(user_factors.cols()); }
  double predict(std::size_t user, std::size_t item) const {
    return user_factors.row(static_cast<Eigen::Index>(user))
        .dot(item_factors.row(static_cast<Eigen::Index>(item)));
  }
};

/// Closed-form ridge solution for one row together with its design matrix.
struct RowSolution {
  Eigen::VectorXd factor;
  Eigen::MatrixXd design;
};

/// Squared reconstruction error over the observed cells plus lambda * Omega.
/// Throws DimensionMismatch when U or V do not match the matrix or each other.
double objective(const FactorMatrix& user_factors, const FactorMatrix& item_factors,
                 const RatingMatrix& ratings, const FitConfig& cfg);

/// Penalty multiplier of a row with `count` ratings. A row with no ratings
/// is treated as if it had one so its design matrix stays lambda * Id.
double penalty_weight(Regularization reg, std::size_t count) noexcept;

/// A = V_J^T V_J + lambda * w * Id for user i's rated items J(i).
Eigen::MatrixXd user_design_matrix(std::size_t user, const FactorMatrix& item_factors,
                                   const RatingMatrix& ratings, double lambda,
                                   Regularization reg);

/// B(j) = U_I^T U_I + lambda * w * Id for item j's raters I(j).
Eigen::MatrixXd item_design_matrix(std::size_t item, const FactorMatrix& user_factors,
                                   const RatingMatrix& ratings, double lambda,
                                   Regularization reg);

/// u = A^{-1} V_J^T R_{i,J}. Cold rows return u = 0. When lambda = 0 leaves
/// A rank deficient the minimum-norm least-squares solution is returned.
RowSolution solve_user_row(std::size_t user, const FactorMatrix& item_factors,
                           const RatingMatrix& ratings, const FitConfig& cfg);

/// Mirror of solve_user_row: v = B(j)^{-1} U_I^T R_{I,j}.
RowSolution solve_item_row(std::size_t item, const FactorMatrix& user_factors,
                           const RatingMatrix& ratings, const FitConfig& cfg);

struct AlsOptions {
  /// Users: every sweep is followed by one more user solve, so the returned
  /// U is the exact minimizer for the returned V. Items: stop right after a
  /// sweep's item solve.
  HalfStep finish_with = HalfStep::Users;
  /// Called with the objective after every half step, including the first.
  std::function<void(HalfStep, double)> on_half_step;
};

/// Alternating least squares. Each sweep solves every user row with V fixed
/// and then every item row with U fixed, until max_sweeps or a relative
/// objective change below objective_tolerance.
///
/// Cold starts initialise V uniformly in [-0.01, 0.01] from cfg.seed, with
/// the first latent coordinate of each item replaced by its mean observed
/// rating. A warm start reuses its factors; rows added since (the matrix
/// grew) are initialised as in a cold start.
FactorModel als_fit(const RatingMatrix& ratings, const FitConfig& cfg,
                    const std::optional<FactorModel>& warm_start = std::nullopt,
                    const AlsOptions& options = {});

// One half step: every row with at least one rating is replaced by its
// closed-form solution. Rows without ratings keep their current values; zeroing
// them would make U = 0, V = 0 a fixed point of the alternation on an empty
// matrix.
void solve_all_users(FactorModel& model, const RatingMatrix& ratings);
void solve_all_items(FactorModel& model, const RatingMatrix& ratings);

}  // namespace beware
