#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "beware/core.hpp"

namespace beware {

/// Block-model ground truth: every item has a genre, every user a type, and
/// the true rating depends only on the (genre, type) pair.
struct BlockModelSpec {
  std::size_t n_users = 200;
  std::size_t n_items = 100;
  std::size_t genres = 5;
  std::size_t types = 5;
  std::vector<int> rating_levels{1, 2, 3, 4, 5};
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Genre/type assignments and the rating table behind a block model.
struct BlockModel {
  std::vector<std::size_t> item_genre;
  std::vector<std::size_t> user_type;
  /// genres x types, row-major.
  std::vector<double> table;
  GroundTruth truth;
};

/// Draws item genres, then user types, then the rating table, all from one
/// generator seeded with spec.seed.
BlockModel generate_block_model(const BlockModelSpec& spec);

GroundTruth generate_ground_truth(const BlockModelSpec& spec);

/// r*_{i,j} plus Gaussian noise with standard deviation `sigma`. Not clipped.
/// Throws Unavailable for masked cells.
double observe_noisy(const GroundTruth& truth, std::size_t user, std::size_t item, double sigma,
                     std::mt19937_64& rng);

/// Standard deviation for a noise parameter read either as a standard
/// deviation or as a variance.
double noise_std_dev(double parameter, bool parameter_is_variance);

}  // namespace beware
