#include "beware/sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "beware/factorization.hpp"
#include "beware/policies.hpp"

namespace beware {

namespace {

struct PolicyInfo {
  PolicyKind kind;
  std::string_view name;
  std::string_view enum_name;
};

constexpr std::array<PolicyInfo, 9> kPolicies{{
    {PolicyKind::GreedyALS, "Greedy.ALS", "GreedyALS"},
    {PolicyKind::GreedyALSWR, "Greedy.ALS-WR", "GreedyALSWR"},
    {PolicyKind::UCBAllUsers, "UCB.on.all.users", "UCBAllUsers"},
    {PolicyKind::BeWAREUser, "BeWARE.User", "BeWAREUser"},
    {PolicyKind::BeWAREUserALS, "BeWARE.ALS.User", "BeWAREUserALS"},
    {PolicyKind::BeWAREItem, "BeWARE.Item", "BeWAREItem"},
    {PolicyKind::BeWAREItemALS, "BeWARE.ALS.Item", "BeWAREItemALS"},
    {PolicyKind::Oracle, "Oracle", "Oracle"},
    {PolicyKind::Random, "Random", "Random"},
}};

constexpr std::array<PolicyKind, 9> kPolicyKinds{
    PolicyKind::GreedyALS,     PolicyKind::GreedyALSWR, PolicyKind::UCBAllUsers,
    PolicyKind::BeWAREUser,    PolicyKind::BeWAREUserALS, PolicyKind::BeWAREItem,
    PolicyKind::BeWAREItemALS, PolicyKind::Oracle,      PolicyKind::Random};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Independent generator per purpose, so e.g. the user sequence does not
// depend on how many random numbers the policy consumed.
enum class Stream : std::uint32_t { Users = 1, Noise = 2, Policy = 3, Warmup = 4, Init = 5 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

HalfStep finishing_step(PolicyKind kind) {
  return kind == PolicyKind::BeWAREItem || kind == PolicyKind::BeWAREItemALS ? HalfStep::Items
                                                                             : HalfStep::Users;
}

std::size_t oracle_choice(const GroundTruth& truth, std::size_t user,
                          std::span<const std::size_t> allowed) {
  std::size_t best = allowed.front();
  double best_value = truth.at(user, best);
  for (const auto j : allowed) {
    const double v = truth.at(user, j);
    if (v > best_value || (v == best_value && j < best)) {
      best = j;
      best_value = v;
    }
  }
  return best;
}

// Owns whatever state a policy needs between steps.
class PolicyRunner {
 public:
  PolicyRunner(const EpisodeConfig& cfg, const GroundTruth& truth, const RatingMatrix& ratings)
      : cfg_(cfg),
        truth_(truth),
        ratings_(ratings),
        fit_(cfg.fit),
        policy_rng_(make_stream(cfg.seed, Stream::Policy)),
        ucb_(truth.n_items()) {
    fit_.regularization = policy_regularization(cfg.policy);
    fit_.seed = make_stream(cfg.seed, Stream::Init)();
    options_.finish_with = finishing_step(cfg.policy);
    if (uses_factor_model(cfg.policy)) model_ = als_fit(ratings_, fit_, std::nullopt, options_);
  }

  std::size_t select(std::size_t user, std::span<const std::size_t> allowed) {
    const double lambda = fit_.lambda;
    switch (cfg_.policy) {
      case PolicyKind::GreedyALS:
      case PolicyKind::GreedyALSWR:
        return greedy_select(*model_, user, allowed).item;
      case PolicyKind::UCBAllUsers:
        return ucb1_select(ucb_, allowed).item;
      case PolicyKind::BeWAREUser:
      case PolicyKind::BeWAREUserALS:
        return beware_user_select(ratings_, *model_, user, lambda, cfg_.alpha, allowed,
                                  fit_.regularization)
            .item;
      case PolicyKind::BeWAREItem:
      case PolicyKind::BeWAREItemALS:
        return beware_item_select(ratings_, *model_, user, lambda, cfg_.alpha, allowed,
                                  fit_.regularization)
            .item;
      case PolicyKind::Oracle:
        return oracle_choice(truth_, user, allowed);
      case PolicyKind::Random: {
        std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
        return allowed[pick(policy_rng_)];
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown policy");
  }

  // Called after the observation has been inserted into the rating matrix.
  void observe(std::size_t item, double reward) {
    ++observed_;
    if (cfg_.policy == PolicyKind::UCBAllUsers) {
      ucb_.update(item, reward);
      return;
    }
    if (!model_) return;
    if (observed_ % cfg_.refit_every != 0) return;
    if (cfg_.full_refit_every != 0 && observed_ % cfg_.full_refit_every == 0) {
      model_ = als_fit(ratings_, fit_, std::nullopt, options_);
      return;
    }
    FitConfig warm = fit_;
    warm.max_sweeps = cfg_.refit_sweeps;
    model_ = als_fit(ratings_, warm, model_, options_);
  }

 private:
  const EpisodeConfig& cfg_;
  const GroundTruth& truth_;
  const RatingMatrix& ratings_;
  FitConfig fit_;
  AlsOptions options_;
  std::mt19937_64 policy_rng_;
  std::optional<FactorModel> model_;
  UcbArmStats ucb_;
  std::size_t observed_ = 0;
};

}  // namespace

std::string_view policy_name(PolicyKind kind) noexcept {
  for (const auto& p : kPolicies) {
    if (p.kind == kind) return p.name;
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (const auto& p : kPolicies) {
    if (iequals(name, p.name) || iequals(name, p.enum_name)) return p.kind;
  }
  return std::nullopt;
}

std::span<const PolicyKind> all_policies() noexcept { return kPolicyKinds; }

bool uses_factor_model(PolicyKind kind) noexcept {
  return kind != PolicyKind::UCBAllUsers && kind != PolicyKind::Oracle &&
         kind != PolicyKind::Random;
}

Regularization policy_regularization(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::GreedyALS:
    case PolicyKind::BeWAREUserALS:
    case PolicyKind::BeWAREItemALS:
      return Regularization::Standard;
    default:
      return Regularization::Weighted;
  }
}

void EpisodeConfig::validate() const {
  fit.validate();
  if (!std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be finite");
  if (refit_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "refit_sweeps must be at least 1");
  if (refit_every < 1) throw Error(ErrorCode::InvalidArgument, "refit_every must be at least 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "warmup_fraction must lie in [0, 1)");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sigma must be finite and nonnegative");
  }
}

double immediate_regret(const GroundTruth& truth, std::size_t user,
                        std::span<const std::size_t> allowed, std::size_t chosen) {
  if (std::find(allowed.begin(), allowed.end(), chosen) == allowed.end()) {
    throw Error(ErrorCode::InvalidArgument, "chosen item is not in the allowed set");
  }
  double best = truth.at(user, chosen);
  for (const auto j : allowed) best = std::max(best, truth.at(user, j));
  return best - truth.at(user, chosen);
}

RegretTrace run_episode(const GroundTruth& truth, const EpisodeConfig& cfg) {
  cfg.validate();
  if (truth.n_users() == 0 || truth.n_items() == 0 || truth.available_count() == 0) {
    throw Error(ErrorCode::InsufficientData, "ground truth has no available rating");
  }
  const std::size_t n = truth.n_users();
  RatingMatrix ratings(n, truth.n_items());

  auto user_rng = make_stream(cfg.seed, Stream::Users);
  auto noise_rng = make_stream(cfg.seed, Stream::Noise);

  std::vector<std::vector<std::size_t>> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = truth.available_items(i);

  if (cfg.warmup_fraction > 0.0) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto j : remaining[i]) cells.emplace_back(i, j);
    }
    auto warm_rng = make_stream(cfg.seed, Stream::Warmup);
    std::shuffle(cells.begin(), cells.end(), warm_rng);
    const auto count = static_cast<std::size_t>(
        std::llround(cfg.warmup_fraction * static_cast<double>(cells.size())));
    cells.resize(count);
    std::sort(cells.begin(), cells.end());
    for (const auto& [i, j] : cells) {
      ratings.insert({i, j, observe_noisy(truth, i, j, cfg.noise_sigma, warm_rng)});
      auto& row = remaining[i];
      row.erase(std::lower_bound(row.begin(), row.end(), j));
    }
  }

  std::vector<std::size_t> active;
  std::size_t total_steps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!remaining[i].empty()) active.push_back(i);
    total_steps += remaining[i].size();
  }

  PolicyRunner policy(cfg, truth, ratings);
  RegretTrace trace;
  trace.steps.reserve(total_steps);
  trace.cumulative.reserve(total_steps);
  double cumulative = 0.0;

  for (std::size_t t = 1; !active.empty(); ++t) {
    std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
    const std::size_t slot = pick(user_rng);
    const std::size_t user = active[slot];
    auto& allowed = remaining[user];

    const std::size_t item = policy.select(user, allowed);
    const double regret = immediate_regret(truth, user, allowed, item);
    const double reward = observe_noisy(truth, user, item, cfg.noise_sigma, noise_rng);
    ratings.insert({user, item, reward});

    allowed.erase(std::lower_bound(allowed.begin(), allowed.end(), item));
    if (allowed.empty()) {
      active[slot] = active.back();
      active.pop_back();
    }

    cumulative += regret;
    trace.steps.push_back({t, user, item, reward, regret});
    trace.cumulative.push_back(cumulative);
    policy.observe(item, reward);
  }
  return trace;
}

RegretCurve aggregate(std::span<const RegretTrace> traces) {
  RegretCurve curve;
  curve.runs = traces.size();
  if (traces.empty()) return curve;
  const std::size_t len = traces.front().size();
  for (const auto& tr : traces) {
    if (tr.size() != len || tr.cumulative.size() != len) {
      throw Error(ErrorCode::LengthMismatch, "traces have different lengths");
    }
  }
  const auto runs = static_cast<double>(traces.size());
  curve.mean.assign(len, 0.0);
  curve.std_error.assign(len, 0.0);
  for (std::size_t s = 0; s < len; ++s) {
    double sum = 0.0;
    for (const auto& tr : traces) sum += tr.cumulative[s];
    const double mean = sum / runs;
    double sq = 0.0;
    for (const auto& tr : traces) {
      const double d = tr.cumulative[s] - mean;
      sq += d * d;
    }
    curve.mean[s] = mean;
    curve.std_error[s] = traces.size() > 1 ? std::sqrt(sq / (runs - 1.0)) / std::sqrt(runs) : 0.0;
  }
  return curve;
}

GroundTruth DatasetSource::truth_for_run(std::size_t run) const {
  if (fixed) return *fixed;
  BlockModelSpec spec = block;
  spec.seed = block.seed + run;
  return generate_ground_truth(spec);
}

std::vector<RegretTrace> run_many(const DatasetSource& source, const EpisodeConfig& cfg,
                                  std::size_t runs, std::size_t threads) {
  cfg.validate();
  if (!source.fixed) source.block.validate();
  std::vector<RegretTrace> traces(runs);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(runs, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      try {
        EpisodeConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + r;
        traces[r] = run_episode(source.truth_for_run(r), run_cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

RegretCurve run_experiment(const DatasetSource& source, const EpisodeConfig& cfg,
                           std::size_t runs, std::size_t threads) {
  const auto traces = run_many(source, cfg, runs, threads);
  return aggregate(traces);
}

void write_curve_csv(std::ostream& out, std::string_view policy, const RegretCurve& curve,
                     bool header) {
  if (header) out << "policy,step,mean_cum_regret,stderr\n";
  const auto old_precision = out.precision(10);
  for (std::size_t s = 0; s < curve.mean.size(); ++s) {
    out << policy << ',' << (s + 1) << ',' << curve.mean[s] << ',' << curve.std_error[s] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace beware
