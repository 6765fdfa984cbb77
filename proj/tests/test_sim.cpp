#include <limits>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "beware/sim.hpp"

using namespace beware;

namespace {

GroundTruth small_truth(std::uint64_t seed) {
  BlockModelSpec spec;
  spec.n_users = 12;
  spec.n_items = 8;
  spec.genres = 3;
  spec.types = 3;
  spec.seed = seed;
  return generate_ground_truth(spec);
}

EpisodeConfig episode(PolicyKind kind, std::uint64_t seed = 0) {
  EpisodeConfig cfg;
  cfg.policy = kind;
  cfg.fit.rank = 3;
  cfg.seed = seed;
  return cfg;
}

RegretTrace trace_of(std::vector<double> cumulative) {
  RegretTrace t;
  double previous = 0.0;
  for (std::size_t s = 0; s < cumulative.size(); ++s) {
    t.steps.push_back({s + 1, 0, s, 0.0, cumulative[s] - previous});
    previous = cumulative[s];
  }
  t.cumulative = std::move(cumulative);
  return t;
}

void check_trace(const RegretTrace& trace, const GroundTruth& gt) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  double running = 0.0;
  ASSERT_EQ(trace.cumulative.size(), trace.steps.size());
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& s = trace.steps[t];
    EXPECT_EQ(s.t, t + 1);
    EXPECT_GE(s.immediate_regret, 0.0);
    EXPECT_TRUE(gt.available(s.user, s.item));
    EXPECT_TRUE(seen.insert({s.user, s.item}).second) << "repeat at step " << s.t;
    running += s.immediate_regret;
    EXPECT_DOUBLE_EQ(trace.cumulative[t], running);
    if (t > 0) EXPECT_GE(trace.cumulative[t], trace.cumulative[t - 1]);
  }
}

}  // namespace

TEST(Regret, Examples) {
  const GroundTruth gt(1, 3, {3, 2, 5});
  const std::vector<std::size_t> all{0, 1, 2};
  EXPECT_EQ(immediate_regret(gt, 0, all, 1), 3.0);
  EXPECT_EQ(immediate_regret(gt, 0, all, 2), 0.0);
  const std::vector<std::size_t> single{1};
  EXPECT_EQ(immediate_regret(gt, 0, single, 1), 0.0);
  EXPECT_THROW(immediate_regret(gt, 0, single, 0), Error);
}

TEST(Episode, SingleCell) {
  const GroundTruth gt(1, 1, {4});
  for (auto kind : all_policies()) {
    const auto trace = run_episode(gt, episode(kind));
    ASSERT_EQ(trace.size(), 1u);
    EXPECT_EQ(trace.total(), 0.0);
  }
}

TEST(Episode, ExhaustsEveryCellWithoutRepeats) {
  const auto gt = small_truth(1);
  for (auto kind : all_policies()) {
    const auto trace = run_episode(gt, episode(kind, 5));
    EXPECT_EQ(trace.size(), 96u) << policy_name(kind);
    check_trace(trace, gt);
  }
}

TEST(Episode, RespectsMask) {
  const GroundTruth gt(3, 3, {5, 1, 2, 4, 4, 1, 3, 2, 5},
                       {true, false, true, true, true, false, false, true, true});
  for (auto kind : all_policies()) {
    const auto trace = run_episode(gt, episode(kind, 2));
    EXPECT_EQ(trace.size(), 6u);
    check_trace(trace, gt);
  }
}

TEST(Episode, OracleHasNoRegret) {
  const auto gt = small_truth(2);
  const auto trace = run_episode(gt, episode(PolicyKind::Oracle, 3));
  for (double c : trace.cumulative) EXPECT_EQ(c, 0.0);
}

TEST(Episode, RandomHasRegret) {
  const auto gt = small_truth(2);
  EXPECT_GT(run_episode(gt, episode(PolicyKind::Random, 3)).total(), 0.0);
}

TEST(Episode, DeterministicGivenSeed) {
  const auto gt = small_truth(3);
  for (auto kind : {PolicyKind::BeWAREItem, PolicyKind::UCBAllUsers, PolicyKind::GreedyALS}) {
    const auto a = run_episode(gt, episode(kind, 11));
    const auto b = run_episode(gt, episode(kind, 11));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
      EXPECT_EQ(a.steps[t].user, b.steps[t].user);
      EXPECT_EQ(a.steps[t].item, b.steps[t].item);
      EXPECT_EQ(a.steps[t].reward, b.steps[t].reward);
    }
    const auto c = run_episode(gt, episode(kind, 12));
    bool differs = false;
    for (std::size_t t = 0; t < a.size() && !differs; ++t) {
      differs = a.steps[t].user != c.steps[t].user || a.steps[t].reward != c.steps[t].reward;
    }
    EXPECT_TRUE(differs);
  }
}

TEST(Episode, PairedSeedsShareUsersAndNoise) {
  const auto gt = small_truth(4);
  const auto a = run_episode(gt, episode(PolicyKind::Random, 7));
  const auto b = run_episode(gt, episode(PolicyKind::Oracle, 7));
  // The first draw happens before any policy state matters.
  EXPECT_EQ(a.steps[0].user, b.steps[0].user);
}

TEST(Episode, WarmupCellsExcluded) {
  const auto gt = small_truth(5);
  auto cfg = episode(PolicyKind::BeWAREUser, 1);
  cfg.warmup_fraction = 0.25;
  const auto trace = run_episode(gt, cfg);
  EXPECT_EQ(trace.size(), 96u - 24u);
  check_trace(trace, gt);
}

TEST(Episode, BatchedAndFullRefits) {
  const auto gt = small_truth(6);
  auto cfg = episode(PolicyKind::GreedyALSWR, 1);
  cfg.refit_every = 5;
  cfg.full_refit_every = 20;
  const auto trace = run_episode(gt, cfg);
  EXPECT_EQ(trace.size(), 96u);
  check_trace(trace, gt);
}

TEST(Episode, InvalidConfig) {
  const auto gt = small_truth(0);
  auto cfg = episode(PolicyKind::BeWAREItem);
  cfg.refit_sweeps = 0;
  EXPECT_THROW(run_episode(gt, cfg), Error);
  cfg = episode(PolicyKind::BeWAREItem);
  cfg.alpha = std::numeric_limits<double>::infinity();
  EXPECT_THROW(run_episode(gt, cfg), Error);
}

TEST(Aggregate, IdenticalTraces) {
  const auto t = trace_of({0, 1, 3});
  const std::vector<RegretTrace> traces{t, t, t};
  const auto curve = aggregate(traces);
  EXPECT_EQ(curve.mean, t.cumulative);
  EXPECT_EQ(curve.std_error, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(curve.runs, 3u);
}

TEST(Aggregate, MeanAndStdError) {
  const auto a = trace_of({0});
  const auto b = trace_of({2});
  const std::vector<RegretTrace> traces{a, b};
  const auto curve = aggregate(traces);
  EXPECT_EQ(curve.mean[0], 1.0);
  // sample sd sqrt(2) over sqrt(2) runs
  EXPECT_DOUBLE_EQ(curve.std_error[0], 1.0);
}

TEST(Aggregate, LengthMismatch) {
  const auto a = trace_of({0, 1});
  const auto b = trace_of({0});
  const std::vector<RegretTrace> traces{a, b};
  try {
    aggregate(traces);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Experiment, ThreadCountDoesNotChangeResult) {
  DatasetSource source;
  source.block.n_users = 10;
  source.block.n_items = 6;
  const auto cfg = episode(PolicyKind::BeWAREItem, 4);
  const auto one = run_experiment(source, cfg, 3, 1);
  const auto many = run_experiment(source, cfg, 3, 3);
  EXPECT_EQ(one.mean, many.mean);
  EXPECT_EQ(one.std_error, many.std_error);
  EXPECT_EQ(one.runs, 3u);
}

TEST(Experiment, SyntheticTruthChangesPerRun) {
  DatasetSource source;
  source.block.n_users = 10;
  source.block.n_items = 6;
  const auto a = source.truth_for_run(0);
  const auto b = source.truth_for_run(1);
  bool differs = false;
  for (std::size_t i = 0; i < 10 && !differs; ++i) {
    for (std::size_t j = 0; j < 6 && !differs; ++j) differs = a.at(i, j) != b.at(i, j);
  }
  EXPECT_TRUE(differs);
}

TEST(Curve, CsvRows) {
  RegretCurve curve;
  curve.mean = {0.0, 1.5};
  curve.std_error = {0.0, 0.25};
  curve.runs = 2;
  std::ostringstream out;
  write_curve_csv(out, "BeWARE.Item", curve, true);
  EXPECT_EQ(out.str(),
            "policy,step,mean_cum_regret,stderr\nBeWARE.Item,1,0,0\nBeWARE.Item,2,1.5,0.25\n");
}

TEST(Policies, NamesRoundTrip) {
  for (auto kind : all_policies()) {
    EXPECT_EQ(parse_policy(policy_name(kind)), kind);
  }
  EXPECT_EQ(parse_policy("beware.item"), PolicyKind::BeWAREItem);
  EXPECT_EQ(parse_policy("UCBAllUsers"), PolicyKind::UCBAllUsers);
  EXPECT_FALSE(parse_policy("Thompson").has_value());
  EXPECT_EQ(policy_regularization(PolicyKind::GreedyALS), Regularization::Standard);
  EXPECT_EQ(policy_regularization(PolicyKind::BeWAREItem), Regularization::Weighted);
  EXPECT_FALSE(uses_factor_model(PolicyKind::UCBAllUsers));
}
