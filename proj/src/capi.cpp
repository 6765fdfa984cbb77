#include "beware/beware.h"

#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "beware/datagen.hpp"
#include "beware/ingest.hpp"
#include "beware/sim.hpp"

struct beware_dataset {
  beware::DatasetSource source;
};

struct beware_curve {
  beware::RegretCurve curve;
};

struct beware_trace {
  beware::RegretTrace trace;
};

namespace {

thread_local std::string last_error;

beware_status to_status(beware::ErrorCode code) {
  using beware::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BEWARE_ERR_INVALID_ARGUMENT;
    case ErrorCode::IndexOutOfRange: return BEWARE_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::DuplicateObservation: return BEWARE_ERR_DUPLICATE_OBSERVATION;
    case ErrorCode::DimensionMismatch: return BEWARE_ERR_DIMENSION_MISMATCH;
    case ErrorCode::SingularSystem: return BEWARE_ERR_SINGULAR_SYSTEM;
    case ErrorCode::EmptyAllowedSet: return BEWARE_ERR_EMPTY_ALLOWED_SET;
    case ErrorCode::Unavailable: return BEWARE_ERR_UNAVAILABLE;
    case ErrorCode::ParseError: return BEWARE_ERR_PARSE;
    case ErrorCode::IoError: return BEWARE_ERR_IO;
    case ErrorCode::InsufficientData: return BEWARE_ERR_INSUFFICIENT_DATA;
    case ErrorCode::LengthMismatch: return BEWARE_ERR_LENGTH_MISMATCH;
  }
  return BEWARE_ERR_INTERNAL;
}

beware_status fail(beware_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
beware_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return BEWARE_OK;
  } catch (const beware::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BEWARE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BEWARE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BEWARE_ERR_INTERNAL, "unknown failure");
  }
}

bool to_kind(beware_policy policy, beware::PolicyKind& out) {
  using beware::PolicyKind;
  switch (policy) {
    case BEWARE_POLICY_GREEDY_ALS: out = PolicyKind::GreedyALS; return true;
    case BEWARE_POLICY_GREEDY_ALS_WR: out = PolicyKind::GreedyALSWR; return true;
    case BEWARE_POLICY_UCB_ALL_USERS: out = PolicyKind::UCBAllUsers; return true;
    case BEWARE_POLICY_BEWARE_USER: out = PolicyKind::BeWAREUser; return true;
    case BEWARE_POLICY_BEWARE_ALS_USER: out = PolicyKind::BeWAREUserALS; return true;
    case BEWARE_POLICY_BEWARE_ITEM: out = PolicyKind::BeWAREItem; return true;
    case BEWARE_POLICY_BEWARE_ALS_ITEM: out = PolicyKind::BeWAREItemALS; return true;
    case BEWARE_POLICY_ORACLE: out = PolicyKind::Oracle; return true;
    case BEWARE_POLICY_RANDOM: out = PolicyKind::Random; return true;
  }
  return false;
}

beware_policy from_kind(beware::PolicyKind kind) {
  using beware::PolicyKind;
  switch (kind) {
    case PolicyKind::GreedyALS: return BEWARE_POLICY_GREEDY_ALS;
    case PolicyKind::GreedyALSWR: return BEWARE_POLICY_GREEDY_ALS_WR;
    case PolicyKind::UCBAllUsers: return BEWARE_POLICY_UCB_ALL_USERS;
    case PolicyKind::BeWAREUser: return BEWARE_POLICY_BEWARE_USER;
    case PolicyKind::BeWAREUserALS: return BEWARE_POLICY_BEWARE_ALS_USER;
    case PolicyKind::BeWAREItem: return BEWARE_POLICY_BEWARE_ITEM;
    case PolicyKind::BeWAREItemALS: return BEWARE_POLICY_BEWARE_ALS_ITEM;
    case PolicyKind::Oracle: return BEWARE_POLICY_ORACLE;
    case PolicyKind::Random: return BEWARE_POLICY_RANDOM;
  }
  return BEWARE_POLICY_ORACLE;
}

beware::EpisodeConfig to_config(const beware_episode_params& p) {
  beware::EpisodeConfig cfg;
  if (!to_kind(p.policy, cfg.policy)) {
    throw beware::Error(beware::ErrorCode::InvalidArgument, "unknown policy");
  }
  cfg.fit.rank = p.rank;
  cfg.fit.lambda = p.lambda;
  cfg.fit.max_sweeps = p.max_sweeps;
  cfg.fit.objective_tolerance = p.objective_tolerance;
  cfg.alpha = p.alpha;
  cfg.refit_sweeps = p.refit_sweeps;
  cfg.refit_every = p.refit_every;
  cfg.full_refit_every = p.full_refit_every;
  cfg.warmup_fraction = p.warmup_fraction;
  cfg.noise_sigma = p.noise_sigma;
  cfg.seed = p.seed;
  cfg.validate();
  return cfg;
}

}  // namespace

extern "C" {

const char* beware_version(void) { return "1.0.0"; }

const char* beware_status_string(beware_status status) {
  switch (status) {
    case BEWARE_OK: return "ok";
    case BEWARE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BEWARE_ERR_INDEX_OUT_OF_RANGE: return "index out of range";
    case BEWARE_ERR_DUPLICATE_OBSERVATION: return "duplicate observation";
    case BEWARE_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case BEWARE_ERR_SINGULAR_SYSTEM: return "singular system";
    case BEWARE_ERR_EMPTY_ALLOWED_SET: return "empty allowed set";
    case BEWARE_ERR_UNAVAILABLE: return "rating unavailable";
    case BEWARE_ERR_PARSE: return "parse error";
    case BEWARE_ERR_IO: return "i/o error";
    case BEWARE_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case BEWARE_ERR_LENGTH_MISMATCH: return "length mismatch";
    case BEWARE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* beware_last_error(void) { return last_error.c_str(); }

void beware_episode_params_default(beware_episode_params* params) {
  if (params == nullptr) return;
  const beware::EpisodeConfig cfg;
  params->policy = from_kind(cfg.policy);
  params->rank = cfg.fit.rank;
  params->lambda = cfg.fit.lambda;
  params->alpha = cfg.alpha;
  params->max_sweeps = cfg.fit.max_sweeps;
  params->objective_tolerance = cfg.fit.objective_tolerance;
  params->refit_sweeps = cfg.refit_sweeps;
  params->refit_every = cfg.refit_every;
  params->full_refit_every = cfg.full_refit_every;
  params->warmup_fraction = cfg.warmup_fraction;
  params->noise_sigma = cfg.noise_sigma;
  params->seed = cfg.seed;
}

void beware_block_params_default(beware_block_params* params) {
  if (params == nullptr) return;
  const beware::BlockModelSpec spec;
  params->n_users = spec.n_users;
  params->n_items = spec.n_items;
  params->genres = spec.genres;
  params->types = spec.types;
  params->seed = spec.seed;
}

beware_status beware_policy_parse(const char* name, beware_policy* out) {
  if (name == nullptr || out == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  const auto kind = beware::parse_policy(name);
  if (!kind) return fail(BEWARE_ERR_INVALID_ARGUMENT, ("unknown policy '" + std::string(name) + "'").c_str());
  *out = from_kind(*kind);
  return BEWARE_OK;
}

const char* beware_policy_name(beware_policy policy) {
  beware::PolicyKind kind;
  if (!to_kind(policy, kind)) return "unknown";
  // Names are string literals, so the view is NUL-terminated.
  return beware::policy_name(kind).data();
}

beware_status beware_dataset_synthetic(const beware_block_params* params, beware_dataset** out) {
  if (params == nullptr || out == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto ds = std::make_unique<beware_dataset>();
    ds->source.block.n_users = params->n_users;
    ds->source.block.n_items = params->n_items;
    ds->source.block.genres = params->genres;
    ds->source.block.types = params->types;
    ds->source.block.seed = params->seed;
    ds->source.block.validate();
    if (params->n_users == 0 || params->n_items == 0) {
      throw beware::Error(beware::ErrorCode::InvalidArgument, "empty synthetic matrix");
    }
    *out = ds.release();
  });
}

beware_status beware_dataset_load_csv(const char* path, size_t top_users, size_t top_items,
                                      beware_dataset** out) {
  if (path == nullptr || out == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto dense = beware::densify(beware::load_csv(path), top_users, top_items);
    auto ds = std::make_unique<beware_dataset>();
    ds->source.fixed = std::move(dense.truth);
    *out = ds.release();
  });
}

void beware_dataset_free(beware_dataset* dataset) { delete dataset; }

beware_status beware_dataset_shape(const beware_dataset* dataset, size_t run, size_t* n_users,
                                   size_t* n_items, double* fill_rate) {
  if (dataset == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null dataset");
  return guarded([&] {
    const auto truth = dataset->source.truth_for_run(run);
    if (n_users) *n_users = truth.n_users();
    if (n_items) *n_items = truth.n_items();
    if (fill_rate) *fill_rate = truth.fill_rate();
  });
}

beware_status beware_dataset_rating(const beware_dataset* dataset, size_t run, size_t user,
                                    size_t item, double* rating) {
  if (dataset == nullptr || rating == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *rating = dataset->source.truth_for_run(run).at(user, item); });
}

beware_status beware_dataset_write_csv(const beware_dataset* dataset, size_t run,
                                       const char* path) {
  if (dataset == nullptr || path == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  return guarded(
      [&] { beware::write_ground_truth_csv(dataset->source.truth_for_run(run), path); });
}

beware_status beware_run_episode(const beware_dataset* dataset, size_t run,
                                 const beware_episode_params* params, beware_trace** out) {
  if (dataset == nullptr || params == nullptr || out == nullptr) {
    return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto tr = std::make_unique<beware_trace>();
    tr->trace = beware::run_episode(dataset->source.truth_for_run(run), to_config(*params));
    *out = tr.release();
  });
}

size_t beware_trace_length(const beware_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.size();
}

beware_status beware_trace_step(const beware_trace* trace, size_t index, size_t* user,
                                size_t* item, double* reward, double* immediate_regret,
                                double* cumulative_regret) {
  if (trace == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null trace");
  if (index >= trace->trace.size()) return fail(BEWARE_ERR_INDEX_OUT_OF_RANGE, "step out of range");
  const auto& s = trace->trace.steps[index];
  if (user) *user = s.user;
  if (item) *item = s.item;
  if (reward) *reward = s.reward;
  if (immediate_regret) *immediate_regret = s.immediate_regret;
  if (cumulative_regret) *cumulative_regret = trace->trace.cumulative[index];
  return BEWARE_OK;
}

void beware_trace_free(beware_trace* trace) { delete trace; }

beware_status beware_run_experiment(const beware_dataset* dataset,
                                    const beware_episode_params* params, size_t runs,
                                    size_t threads, beware_curve** out) {
  if (dataset == nullptr || params == nullptr || out == nullptr) {
    return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  if (runs == 0) return fail(BEWARE_ERR_INVALID_ARGUMENT, "runs must be at least 1");
  return guarded([&] {
    auto c = std::make_unique<beware_curve>();
    c->curve = beware::run_experiment(dataset->source, to_config(*params), runs, threads);
    *out = c.release();
  });
}

size_t beware_curve_length(const beware_curve* curve) {
  return curve == nullptr ? 0 : curve->curve.mean.size();
}

size_t beware_curve_runs(const beware_curve* curve) {
  return curve == nullptr ? 0 : curve->curve.runs;
}

beware_status beware_curve_point(const beware_curve* curve, size_t step_index,
                                 double* mean_cumulative_regret, double* std_error) {
  if (curve == nullptr) return fail(BEWARE_ERR_INVALID_ARGUMENT, "null curve");
  if (step_index >= curve->curve.mean.size()) {
    return fail(BEWARE_ERR_INDEX_OUT_OF_RANGE, "step out of range");
  }
  if (mean_cumulative_regret) *mean_cumulative_regret = curve->curve.mean[step_index];
  if (std_error) *std_error = curve->curve.std_error[step_index];
  return BEWARE_OK;
}

beware_status beware_curve_write_csv(const beware_curve* curve, const char* policy,
                                     const char* path, int write_header) {
  if (curve == nullptr || policy == nullptr || path == nullptr) {
    return fail(BEWARE_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::ofstream file(path, write_header ? std::ios::trunc : std::ios::app);
    if (!file) throw beware::Error(beware::ErrorCode::IoError, std::string("cannot open ") + path);
    beware::write_curve_csv(file, policy, curve->curve, write_header != 0);
    if (!file) throw beware::Error(beware::ErrorCode::IoError, std::string("write to ") + path + " failed");
  });
}

void beware_curve_free(beware_curve* curve) { delete curve; }

}  // extern "C"
