// Command-line front end for the simulator. Uses the C API only.
//
//   beware simulate --dataset synthetic --policy BeWARE.Item --runs 20 --out regret.csv
//   beware compare --policies Greedy.ALS,UCB.on.all.users,BeWARE.Item --out regret.csv
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cmath>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beware/beware.h"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct Options {
  std::string dataset = "synthetic";
  std::string policy = "BeWARE.Item";
  std::vector<std::string> policies;
  std::size_t k = 5;
  double lambda = 0.05;
  double alpha = 0.12;
  std::size_t users = 200;
  std::size_t items = 100;
  std::size_t genres = 5;
  std::size_t types = 5;
  double noise_sigma = 0.5;
  bool noise_is_variance = false;
  std::size_t runs = 20;
  std::uint64_t seed = 0;
  std::size_t refit_sweeps = 2;
  std::size_t refit_every = 1;
  std::size_t full_refit_every = 0;
  std::size_t max_sweeps = 20;
  double tolerance = 1e-6;
  double warmup_fraction = 0.0;
  std::size_t threads = 0;
  std::string out;
};

struct DatasetDeleter {
  void operator()(beware_dataset* d) const { beware_dataset_free(d); }
};
struct CurveDeleter {
  void operator()(beware_curve* c) const { beware_curve_free(c); }
};
using DatasetPtr = std::unique_ptr<beware_dataset, DatasetDeleter>;
using CurvePtr = std::unique_ptr<beware_curve, CurveDeleter>;

// Data-side failures (unreadable file, bad CSV, empty selection) map to the
// data exit code; everything else is a usage problem.
int exit_code_for(beware_status status) {
  switch (status) {
    case BEWARE_ERR_PARSE:
    case BEWARE_ERR_IO:
    case BEWARE_ERR_INSUFFICIENT_DATA:
    case BEWARE_ERR_UNAVAILABLE:
      return kDataError;
    case BEWARE_ERR_INVALID_ARGUMENT:
      return kUsageError;
    default:
      return kDataError;
  }
}

int report(beware_status status, const std::string& context) {
  std::cerr << "beware: " << context << ": " << beware_status_string(status);
  const std::string detail = beware_last_error();
  if (!detail.empty()) std::cerr << " (" << detail << ")";
  std::cerr << '\n';
  return exit_code_for(status);
}

void add_common_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--dataset", o.dataset, "synthetic or csv:PATH")->capture_default_str();
  cmd.add_option("--k", o.k, "Latent rank")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--lambda", o.lambda, "Regularization weight")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--alpha", o.alpha, "Exploration weight")->capture_default_str();
  cmd.add_option("--users", o.users, "Users (synthetic) or densify user limit (csv)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--items", o.items, "Items (synthetic) or densify item limit (csv)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--genres", o.genres, "Item genres of the block model")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--types", o.types, "User types of the block model")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--noise-sigma", o.noise_sigma, "Feedback noise standard deviation")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_flag("--noise-is-variance", o.noise_is_variance,
               "Read --noise-sigma as a variance instead of a standard deviation");
  cmd.add_option("--runs", o.runs, "Episodes to average")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "Base seed; run r uses seed + r")->capture_default_str();
  cmd.add_option("--refit-sweeps", o.refit_sweeps, "ALS sweeps per warm refit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--refit-every", o.refit_every, "Refit after this many observations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--full-refit-every", o.full_refit_every,
                 "Cold refit every this many observations (0 = never)")
      ->capture_default_str();
  cmd.add_option("--max-sweeps", o.max_sweeps, "ALS sweeps for cold fits")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--tolerance", o.tolerance, "Relative objective tolerance")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--warmup-fraction", o.warmup_fraction,
                 "Fraction of cells revealed before the episode starts")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.999999));
  cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd.add_option("--out", o.out, "Output CSV path")->required();
}

int open_dataset(const Options& o, DatasetPtr& out) {
  beware_dataset* raw = nullptr;
  beware_status status;
  if (o.dataset == "synthetic") {
    beware_block_params p;
    beware_block_params_default(&p);
    p.n_users = o.users;
    p.n_items = o.items;
    p.genres = o.genres;
    p.types = o.types;
    p.seed = o.seed;
    status = beware_dataset_synthetic(&p, &raw);
  } else if (o.dataset.rfind("csv:", 0) == 0) {
    status = beware_dataset_load_csv(o.dataset.c_str() + 4, o.users, o.items, &raw);
  } else {
    std::cerr << "beware: --dataset must be 'synthetic' or 'csv:PATH'\n";
    return kUsageError;
  }
  if (status != BEWARE_OK) return report(status, "loading dataset");
  out.reset(raw);
  return 0;
}

int run(const Options& o, const std::vector<std::string>& policy_names) {
  std::vector<beware_policy> policies;
  for (const auto& name : policy_names) {
    beware_policy p;
    if (beware_policy_parse(name.c_str(), &p) != BEWARE_OK) {
      std::cerr << "beware: unknown policy '" << name << "'\n";
      return kUsageError;
    }
    policies.push_back(p);
  }
  if (policies.empty()) {
    std::cerr << "beware: no policy given\n";
    return kUsageError;
  }

  DatasetPtr dataset;
  if (const int rc = open_dataset(o, dataset); rc != 0) return rc;

  beware_episode_params params;
  beware_episode_params_default(&params);
  params.rank = o.k;
  params.lambda = o.lambda;
  params.alpha = o.alpha;
  params.max_sweeps = o.max_sweeps;
  params.objective_tolerance = o.tolerance;
  params.refit_sweeps = o.refit_sweeps;
  params.refit_every = o.refit_every;
  params.full_refit_every = o.full_refit_every;
  params.warmup_fraction = o.warmup_fraction;
  params.noise_sigma = o.noise_is_variance ? std::sqrt(o.noise_sigma) : o.noise_sigma;
  params.seed = o.seed;

  bool first = true;
  for (const auto policy : policies) {
    params.policy = policy;
    beware_curve* raw = nullptr;
    const auto status = beware_run_experiment(dataset.get(), &params, o.runs, o.threads, &raw);
    if (status != BEWARE_OK) {
      return report(status, std::string("running ") + beware_policy_name(policy));
    }
    CurvePtr curve(raw);
    const auto written =
        beware_curve_write_csv(curve.get(), beware_policy_name(policy), o.out.c_str(), first);
    if (written != BEWARE_OK) return report(written, "writing " + o.out);
    first = false;

    const std::size_t len = beware_curve_length(curve.get());
    double mean = 0.0;
    double se = 0.0;
    if (len > 0) beware_curve_point(curve.get(), len - 1, &mean, &se);
    std::cout << beware_policy_name(policy) << ": final mean cumulative regret " << mean
              << " +/- " << se << " over " << o.runs << " runs, " << len << " steps\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit-driven matrix factorization recommendation simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(beware_version()));

  Options sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Run one policy and write its regret curve");
  simulate->add_option("--policy", sim_opts.policy, "Policy name")->capture_default_str();
  add_common_flags(*simulate, sim_opts);

  Options cmp_opts;
  auto* compare = app.add_subcommand("compare", "Run several policies on shared seeds");
  compare->add_option("--policies", cmp_opts.policies, "Comma-separated policy names")
      ->delimiter(',')
      ->required();
  add_common_flags(*compare, cmp_opts);

  Options gen_opts;
  auto* generate =
      app.add_subcommand("generate", "Write a synthetic ground truth as user,item,rating CSV");
  generate->add_option("--users", gen_opts.users)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--items", gen_opts.items)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--genres", gen_opts.genres)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--types", gen_opts.types)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_opts.seed)->capture_default_str();
  generate->add_option("--out", gen_opts.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  if (*simulate) return run(sim_opts, {sim_opts.policy});
  if (*compare) return run(cmp_opts, cmp_opts.policies);
  if (*generate) {
    beware_block_params p;
    beware_block_params_default(&p);
    p.n_users = gen_opts.users;
    p.n_items = gen_opts.items;
    p.genres = gen_opts.genres;
    p.types = gen_opts.types;
    p.seed = gen_opts.seed;
    beware_dataset* raw = nullptr;
    if (const auto s = beware_dataset_synthetic(&p, &raw); s != BEWARE_OK) {
      return report(s, "generating");
    }
    DatasetPtr dataset(raw);
    if (const auto s = beware_dataset_write_csv(dataset.get(), 0, gen_opts.out.c_str());
        s != BEWARE_OK) {
      return report(s, "writing " + gen_opts.out);
    }
    return 0;
  }
  return kUsageError;
}
