#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "beware/core.hpp"

namespace beware {

struct RawRating {
  std::string user_id;
  std::string item_id;
  double rating;
};

struct RawRatingsFile {
  std::vector<RawRating> records;
};

/// Reads `user_id,item_id,rating` lines. A first line whose third field is
/// not a number is treated as a header. Blank lines are skipped.
/// Throws ParseError (with the 1-based line number) or IoError.
RawRatingsFile load_csv(const std::filesystem::path& path);
RawRatingsFile parse_csv(std::istream& in);

struct DensifiedData {
  GroundTruth truth;
  /// Row / column order of `truth`: most ratings first.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  double fill_rate() const noexcept { return truth.fill_rate(); }
};

/// Keeps the `top_items` most-rated items, then the `top_users` users with
/// the most ratings on those items. Popularity ties go to the
/// lexicographically smaller id; a repeated (user, item) pair keeps its last
/// rating. Throws InsufficientData when nothing survives the selection.
DensifiedData densify(const RawRatingsFile& raw, std::size_t top_users, std::size_t top_items);

/// Writes the available cells of `truth` as `user,item,rating` with 0-based
/// numeric ids and a header line, readable by load_csv.
void write_ground_truth_csv(const GroundTruth& truth, const std::filesystem::path& path);

}  // namespace beware
