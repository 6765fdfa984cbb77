#include "beware/factorization.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace beware {

namespace {

using Eigen::Index;

void check_factor_shapes(const FactorMatrix& user_factors, const FactorMatrix& item_factors,
                         const RatingMatrix& ratings) {
  if (static_cast<std::size_t>(user_factors.rows()) != ratings.n_users() ||
      static_cast<std::size_t>(item_factors.rows()) != ratings.n_items() ||
      user_factors.cols() != item_factors.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "factors " + std::to_string(user_factors.rows()) + "x" +
                    std::to_string(user_factors.cols()) + " / " +
                    std::to_string(item_factors.rows()) + "x" +
                    std::to_string(item_factors.cols()) + " do not fit a " +
                    std::to_string(ratings.n_users()) + "x" + std::to_string(ratings.n_items()) +
                    " rating matrix");
  }
}

// Solves one regularized least-squares row against the fixed factors of the
// other side. Buffers are reused across rows within a half step.
class RowSolver {
 public:
  RowSolver(Index rank, double lambda, Regularization reg)
      : lambda_(lambda), reg_(reg), design_(rank, rank), rhs_(rank), llt_(rank) {}

  const Eigen::MatrixXd& design() const { return design_; }

  void build_design(std::span<const RatedEntry> entries, const FactorMatrix& fixed) {
    design_.setZero();
    rhs_.setZero();
    for (const auto& e : entries) {
      const auto f = fixed.row(static_cast<Index>(e.index));
      design_.selfadjointView<Eigen::Lower>().rankUpdate(f.transpose());
      rhs_.noalias() += e.rating * f.transpose();
    }
    for (Index r = 0; r < design_.rows(); ++r) {
      for (Index c = r + 1; c < design_.cols(); ++c) design_(r, c) = design_(c, r);
    }
    const double ridge = lambda_ * penalty_weight(reg_, entries.size());
    design_.diagonal().array() += ridge;
  }

  // Writes the solution into `out` (a row of the factor matrix being updated).
  template <typename Row>
  void solve(std::span<const RatedEntry> entries, const FactorMatrix& fixed, Row&& out) {
    build_design(entries, fixed);
    if (entries.empty()) {
      out.setZero();
      return;
    }
    if (lambda_ > 0.0) {
      llt_.compute(design_);
      if (llt_.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularSystem, "design matrix is not positive definite");
      }
      out = llt_.solve(rhs_).transpose();
    } else {
      // lambda = 0: A may be only semidefinite. Minimum-norm least squares on
      // the stacked rows is the limit of the ridge solution as lambda -> 0.
      Eigen::MatrixXd stacked(static_cast<Index>(entries.size()), design_.cols());
      Eigen::VectorXd target(static_cast<Index>(entries.size()));
      for (std::size_t r = 0; r < entries.size(); ++r) {
        stacked.row(static_cast<Index>(r)) = fixed.row(static_cast<Index>(entries[r].index));
        target(static_cast<Index>(r)) = entries[r].rating;
      }
      out = stacked.completeOrthogonalDecomposition().solve(target).transpose();
    }
    if (!out.allFinite()) {
      throw Error(ErrorCode::SingularSystem, "row solution is not finite");
    }
  }

 private:
  double lambda_;
  Regularization reg_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd rhs_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

void initialise_item_rows(FactorMatrix& item_factors, Index first_row, const RatingMatrix& ratings,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> small(-0.01, 0.01);
  for (Index j = first_row; j < item_factors.rows(); ++j) {
    for (Index c = 0; c < item_factors.cols(); ++c) item_factors(j, c) = small(rng);
    const auto entries = ratings.item_entries(static_cast<std::size_t>(j));
    double mean = 0.0;
    for (const auto& e : entries) mean += e.rating;
    item_factors(j, 0) = entries.empty() ? 0.0 : mean / static_cast<double>(entries.size());
  }
}

}  // namespace

double penalty_weight(Regularization reg, std::size_t count) noexcept {
  if (reg == Regularization::Standard) return 1.0;
  return count == 0 ? 1.0 : static_cast<double>(count);
}

double objective(const FactorMatrix& user_factors, const FactorMatrix& item_factors,
                 const RatingMatrix& ratings, const FitConfig& cfg) {
  check_factor_shapes(user_factors, item_factors, ratings);
  double residual = 0.0;
  double penalty = 0.0;
  for (std::size_t i = 0; i < ratings.n_users(); ++i) {
    const auto entries = ratings.user_entries(i);
    const auto u = user_factors.row(static_cast<Index>(i));
    for (const auto& e : entries) {
      const double d = e.rating - u.dot(item_factors.row(static_cast<Index>(e.index)));
      residual += d * d;
    }
    const double w = cfg.regularization == Regularization::Standard
                         ? 1.0
                         : static_cast<double>(entries.size());
    penalty += w * u.squaredNorm();
  }
  for (std::size_t j = 0; j < ratings.n_items(); ++j) {
    const double w = cfg.regularization == Regularization::Standard
                         ? 1.0
                         : static_cast<double>(ratings.item_count(j));
    penalty += w * item_factors.row(static_cast<Index>(j)).squaredNorm();
  }
  return residual + cfg.lambda * penalty;
}

Eigen::MatrixXd user_design_matrix(std::size_t user, const FactorMatrix& item_factors,
                                   const RatingMatrix& ratings, double lambda,
                                   Regularization reg) {
  if (static_cast<std::size_t>(item_factors.rows()) != ratings.n_items()) {
    throw Error(ErrorCode::DimensionMismatch, "item factors do not match the rating matrix");
  }
  RowSolver solver(item_factors.cols(), lambda, reg);
  solver.build_design(ratings.user_entries(user), item_factors);
  return solver.design();
}

Eigen::MatrixXd item_design_matrix(std::size_t item, const FactorMatrix& user_factors,
                                   const RatingMatrix& ratings, double lambda,
                                   Regularization reg) {
  if (static_cast<std::size_t>(user_factors.rows()) != ratings.n_users()) {
    throw Error(ErrorCode::DimensionMismatch, "user factors do not match the rating matrix");
  }
  RowSolver solver(user_factors.cols(), lambda, reg);
  solver.build_design(ratings.item_entries(item), user_factors);
  return solver.design();
}

RowSolution solve_user_row(std::size_t user, const FactorMatrix& item_factors,
                           const RatingMatrix& ratings, const FitConfig& cfg) {
  if (static_cast<std::size_t>(item_factors.rows()) != ratings.n_items()) {
    throw Error(ErrorCode::DimensionMismatch, "item factors do not match the rating matrix");
  }
  RowSolver solver(item_factors.cols(), cfg.lambda, cfg.regularization);
  RowSolution out{Eigen::VectorXd(item_factors.cols()), {}};
  solver.solve(ratings.user_entries(user), item_factors, out.factor.transpose());
  out.design = solver.design();
  return out;
}

RowSolution solve_item_row(std::size_t item, const FactorMatrix& user_factors,
                           const RatingMatrix& ratings, const FitConfig& cfg) {
  if (static_cast<std::size_t>(user_factors.rows()) != ratings.n_users()) {
    throw Error(ErrorCode::DimensionMismatch, "user factors do not match the rating matrix");
  }
  RowSolver solver(user_factors.cols(), cfg.lambda, cfg.regularization);
  RowSolution out{Eigen::VectorXd(user_factors.cols()), {}};
  solver.solve(ratings.item_entries(item), user_factors, out.factor.transpose());
  out.design = solver.design();
  return out;
}

void solve_all_users(FactorModel& model, const RatingMatrix& ratings) {
  check_factor_shapes(model.user_factors, model.item_factors, ratings);
  RowSolver solver(model.item_factors.cols(), model.config.lambda, model.config.regularization);
  for (std::size_t i = 0; i < ratings.n_users(); ++i) {
    const auto entries = ratings.user_entries(i);
    if (entries.empty()) continue;
    solver.solve(entries, model.item_factors, model.user_factors.row(static_cast<Index>(i)));
  }
  model.last_half_step = HalfStep::Users;
}

void solve_all_items(FactorModel& model, const RatingMatrix& ratings) {
  check_factor_shapes(model.user_factors, model.item_factors, ratings);
  RowSolver solver(model.user_factors.cols(), model.config.lambda, model.config.regularization);
  for (std::size_t j = 0; j < ratings.n_items(); ++j) {
    const auto entries = ratings.item_entries(j);
    if (entries.empty()) continue;
    solver.solve(entries, model.user_factors, model.item_factors.row(static_cast<Index>(j)));
  }
  model.last_half_step = HalfStep::Items;
}

FactorModel als_fit(const RatingMatrix& ratings, const FitConfig& cfg,
                    const std::optional<FactorModel>& warm_start, const AlsOptions& options) {
  cfg.validate();
  const auto k = static_cast<Index>(cfg.rank);
  const auto n = static_cast<Index>(ratings.n_users());
  const auto m = static_cast<Index>(ratings.n_items());

  FactorModel model;
  model.config = cfg;
  model.user_factors = FactorMatrix::Zero(n, k);
  model.item_factors.resize(m, k);
  std::mt19937_64 rng(cfg.seed);

  double previous = std::numeric_limits<double>::infinity();
  if (warm_start) {
    const auto& w = *warm_start;
    if (w.user_factors.cols() != k || w.item_factors.cols() != k) {
      throw Error(ErrorCode::InvalidArgument, "warm start rank differs from the configured rank");
    }
    if (w.user_factors.rows() > n || w.item_factors.rows() > m) {
      throw Error(ErrorCode::DimensionMismatch, "warm start is larger than the rating matrix");
    }
    model.user_factors.topRows(w.user_factors.rows()) = w.user_factors;
    model.item_factors.topRows(w.item_factors.rows()) = w.item_factors;
    initialise_item_rows(model.item_factors, w.item_factors.rows(), ratings, rng);
    previous = objective(model.user_factors, model.item_factors, ratings, cfg);
  } else {
    initialise_item_rows(model.item_factors, 0, ratings, rng);
  }

  auto report = [&](HalfStep step) {
    if (options.on_half_step) {
      options.on_half_step(step,
                           objective(model.user_factors, model.item_factors, ratings, cfg));
    }
  };

  for (std::size_t sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    solve_all_users(model, ratings);
    report(HalfStep::Users);
    solve_all_items(model, ratings);
    report(HalfStep::Items);
    model.sweeps_run = sweep;
    const double current = objective(model.user_factors, model.item_factors, ratings, cfg);
    if (std::isfinite(previous) &&
        std::abs(previous - current) <= cfg.objective_tolerance * (1.0 + previous)) {
      break;
    }
    previous = current;
  }
  if (options.finish_with == HalfStep::Users) {
    solve_all_users(model, ratings);
    report(HalfStep::Users);
  }
  model.last_objective = objective(model.user_factors, model.item_factors, ratings, cfg);
  return model;
}

}  // namespace beware
