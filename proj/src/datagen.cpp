#include "beware/datagen.hpp"

#include <cmath>

namespace beware {

void BlockModelSpec::validate() const {
  if (genres < 1) throw Error(ErrorCode::InvalidArgument, "genres must be at least 1");
  if (types < 1) throw Error(ErrorCode::InvalidArgument, "types must be at least 1");
  if (rating_levels.empty()) throw Error(ErrorCode::InvalidArgument, "no rating levels");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sigma must be finite and nonnegative");
  }
}

BlockModel generate_block_model(const BlockModelSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick_genre(0, spec.genres - 1);
  std::uniform_int_distribution<std::size_t> pick_type(0, spec.types - 1);
  std::uniform_int_distribution<std::size_t> pick_level(0, spec.rating_levels.size() - 1);

  BlockModel out;
  out.item_genre.resize(spec.n_items);
  for (auto& g : out.item_genre) g = pick_genre(rng);
  out.user_type.resize(spec.n_users);
  for (auto& t : out.user_type) t = pick_type(rng);
  out.table.resize(spec.genres * spec.types);
  for (auto& p : out.table) p = spec.rating_levels[pick_level(rng)];

  std::vector<double> values(spec.n_users * spec.n_items);
  for (std::size_t i = 0; i < spec.n_users; ++i) {
    for (std::size_t j = 0; j < spec.n_items; ++j) {
      values[i * spec.n_items + j] = out.table[out.item_genre[j] * spec.types + out.user_type[i]];
    }
  }
  out.truth = GroundTruth(spec.n_users, spec.n_items, std::move(values));
  return out;
}

GroundTruth generate_ground_truth(const BlockModelSpec& spec) {
  return generate_block_model(spec).truth;
}

double observe_noisy(const GroundTruth& truth, std::size_t user, std::size_t item, double sigma,
                     std::mt19937_64& rng) {
  const double clean = truth.at(user, item);
  if (sigma == 0.0) return clean;
  std::normal_distribution<double> noise(0.0, sigma);
  return clean + noise(rng);
}

double noise_std_dev(double parameter, bool parameter_is_variance) {
  if (!(parameter >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise must be nonnegative");
  return parameter_is_variance ? std::sqrt(parameter) : parameter;
}

}  // namespace beware
