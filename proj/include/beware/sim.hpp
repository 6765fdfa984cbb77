#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beware/core.hpp"
#include "beware/datagen.hpp"

namespace beware {

enum class PolicyKind {
  GreedyALS,
  GreedyALSWR,
  UCBAllUsers,
  BeWAREUser,
  BeWAREUserALS,
  BeWAREItem,
  BeWAREItemALS,
  // Harness checks: the oracle reads the ground truth, Random picks uniformly.
  Oracle,
  Random,
};

/// Display name, e.g. "BeWARE.Item" or "Greedy.ALS-WR".
std::string_view policy_name(PolicyKind kind) noexcept;
/// Accepts the display names and the enumerator spellings, case-insensitively.
std::optional<PolicyKind> parse_policy(std::string_view name);
std::span<const PolicyKind> all_policies() noexcept;

/// Whether the policy keeps a factor model, and with which regularization.
bool uses_factor_model(PolicyKind kind) noexcept;
Regularization policy_regularization(PolicyKind kind) noexcept;

struct EpisodeConfig {
  PolicyKind policy = PolicyKind::BeWAREItem;
  /// The regularization field is overridden by the policy.
  FitConfig fit;
  double alpha = 0.12;
  /// ALS sweeps per warm-started refit.
  std::size_t refit_sweeps = 2;
  /// Refit after every this many observations.
  std::size_t refit_every = 1;
  /// Replace the warm refit by a cold fit every this many observations; 0 = never.
  std::size_t full_refit_every = 0;
  /// Fraction of the available cells revealed before the first step. They
  /// are excluded from the trace.
  double warmup_fraction = 0.0;
  /// Standard deviation of the feedback noise.
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RegretStep {
  std::size_t t;  // 1-based
  std::size_t user;
  std::size_t item;
  double reward;
  double immediate_regret;
};

struct RegretTrace {
  std::vector<RegretStep> steps;
  /// cumulative[t-1] = sum of immediate regrets up to step t.
  std::vector<double> cumulative;

  std::size_t size() const noexcept { return steps.size(); }
  double total() const noexcept { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Best allowed true rating minus the true rating of `chosen`.
/// Throws InvalidArgument if chosen is not allowed, Unavailable for masked cells.
double immediate_regret(const GroundTruth& truth, std::size_t user,
                        std::span<const std::size_t> allowed, std::size_t chosen);

/// One online episode: starting from an empty rating matrix, repeatedly draw
/// a user uniformly among those with unconsumed items, let the policy pick
/// one of that user's unconsumed available items, record the regret against
/// the noiseless truth, reveal a noisy rating, and refresh the policy state.
/// Ends when every available cell has been consumed.
RegretTrace run_episode(const GroundTruth& truth, const EpisodeConfig& cfg);

struct RegretCurve {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t runs = 0;
};

/// Pointwise mean and standard error of the cumulative regret.
/// Throws LengthMismatch if the traces differ in length.
RegretCurve aggregate(std::span<const RegretTrace> traces);

/// Where each run's ground truth comes from.
struct DatasetSource {
  /// Fixed matrix shared by all runs (e.g. densified real data).
  std::optional<GroundTruth> fixed;
  /// Otherwise a block model regenerated for run r with seed block.seed + r.
  BlockModelSpec block;

  GroundTruth truth_for_run(std::size_t run) const;
};

/// Runs `runs` episodes; run r uses episode seed cfg.seed + r, so two policies
/// given the same source and seed see the same users, truths and noise.
/// Episodes run on up to `threads` worker threads (0 = hardware concurrency).
std::vector<RegretTrace> run_many(const DatasetSource& source, const EpisodeConfig& cfg,
                                  std::size_t runs, std::size_t threads = 0);

RegretCurve run_experiment(const DatasetSource& source, const EpisodeConfig& cfg,
                           std::size_t runs, std::size_t threads = 0);

/// One CSV row per step: policy,step,mean_cum_regret,stderr.
void write_curve_csv(std::ostream& out, std::string_view policy, const RegretCurve& curve,
                     bool header);

}  // namespace beware
