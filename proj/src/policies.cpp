#include "beware/policies.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Cholesky>

namespace beware {

namespace {

using Eigen::Index;

void require_nonempty(std::span<const std::size_t> allowed) {
  if (allowed.empty()) throw Error(ErrorCode::EmptyAllowedSet, "no item is allowed");
}

// Running argmax with lowest-index tie-break, independent of input order.
class BestSelection {
 public:
  void offer(std::size_t item, double exploit, double bonus) {
    const double score = exploit + bonus;
    if (!found_ || score > best_.score || (score == best_.score && item < best_.item)) {
      best_ = Selection{item, score, exploit, bonus};
      found_ = true;
    }
  }
  const Selection& result() const { return best_; }

 private:
  Selection best_;
  bool found_ = false;
};

void check_item(const FactorModel& model, std::size_t item) {
  if (item >= static_cast<std::size_t>(model.item_factors.rows())) {
    throw Error(ErrorCode::IndexOutOfRange, "item " + std::to_string(item) + " out of range");
  }
}

void check_user(const FactorModel& model, std::size_t user) {
  if (user >= static_cast<std::size_t>(model.user_factors.rows())) {
    throw Error(ErrorCode::IndexOutOfRange, "user " + std::to_string(user) + " out of range");
  }
}

Eigen::LLT<Eigen::MatrixXd> factor_design(const Eigen::MatrixXd& design) {
  Eigen::LLT<Eigen::MatrixXd> llt(design);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "design matrix is not positive definite");
  }
  return llt;
}

double width_from(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& probe) {
  // w A^{-1} w^T = ||L^{-1} w||^2
  return std::sqrt(llt.matrixL().solve(probe).squaredNorm());
}

}  // namespace

void UcbArmStats::update(std::size_t arm, double reward) {
  if (arm >= pulls_.size()) {
    pulls_.resize(arm + 1, 0);
    means_.resize(arm + 1, 0.0);
  }
  const auto n = ++pulls_[arm];
  means_[arm] += (reward - means_[arm]) / static_cast<double>(n);
  ++total_;
}

void UcbArmStats::set(std::size_t arm, std::size_t pulls, double mean) {
  if (arm >= pulls_.size()) {
    pulls_.resize(arm + 1, 0);
    means_.resize(arm + 1, 0.0);
  }
  total_ = total_ - pulls_[arm] + pulls;
  pulls_[arm] = pulls;
  means_[arm] = mean;
}

double ellipsoid_width(const Eigen::MatrixXd& design, const Eigen::VectorXd& probe) {
  return width_from(factor_design(design), probe);
}

Selection greedy_select(const FactorModel& model, std::size_t user,
                        std::span<const std::size_t> allowed) {
  require_nonempty(allowed);
  check_user(model, user);
  BestSelection best;
  for (const auto j : allowed) {
    check_item(model, j);
    best.offer(j, model.predict(user, j), 0.0);
  }
  return best.result();
}

Selection ucb1_select(const UcbArmStats& stats, std::span<const std::size_t> allowed) {
  require_nonempty(allowed);
  std::size_t untried = std::numeric_limits<std::size_t>::max();
  for (const auto j : allowed) {
    const bool tried = j < stats.n_arms() && stats.pulls(j) > 0;
    if (!tried && j < untried) untried = j;
  }
  if (untried != std::numeric_limits<std::size_t>::max()) {
    return Selection{untried, std::numeric_limits<double>::infinity(), 0.0,
                     std::numeric_limits<double>::infinity()};
  }
  const double log_t = std::log(static_cast<double>(stats.total_pulls()));
  BestSelection best;
  for (const auto j : allowed) {
    const double bonus = std::sqrt(2.0 * log_t / static_cast<double>(stats.pulls(j)));
    best.offer(j, stats.mean(j), bonus);
  }
  return best.result();
}

Selection beware_user_select(const RatingMatrix& ratings, const FactorModel& model,
                             std::size_t user, double lambda, double alpha,
                             std::span<const std::size_t> allowed, Regularization reg) {
  require_nonempty(allowed);
  check_user(model, user);
  const Eigen::VectorXd u = model.user_factors.row(static_cast<Index>(user)).transpose();

  std::optional<Eigen::LLT<Eigen::MatrixXd>> llt;
  if (alpha != 0.0) {
    llt = factor_design(user_design_matrix(user, model.item_factors, ratings, lambda, reg));
  }

  BestSelection best;
  Eigen::VectorXd v(u.size());
  for (const auto j : allowed) {
    check_item(model, j);
    v = model.item_factors.row(static_cast<Index>(j)).transpose();
    const double bonus = llt ? alpha * width_from(*llt, v) : 0.0;
    best.offer(j, model.predict(user, j), bonus);
  }
  return best.result();
}

Selection beware_item_select(const RatingMatrix& ratings, const FactorModel& model,
                             std::size_t user, double lambda, double alpha,
                             std::span<const std::size_t> allowed, Regularization reg) {
  require_nonempty(allowed);
  check_user(model, user);
  const Eigen::VectorXd u = model.user_factors.row(static_cast<Index>(user)).transpose();

  BestSelection best;
  for (const auto j : allowed) {
    check_item(model, j);
    const double exploit = model.predict(user, j);
    double bonus = 0.0;
    if (alpha != 0.0) {
      const auto llt =
          factor_design(item_design_matrix(j, model.user_factors, ratings, lambda, reg));
      bonus = alpha * width_from(llt, u);
    }
    best.offer(j, exploit, bonus);
  }
  return best.result();
}

}  // namespace beware
