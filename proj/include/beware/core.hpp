#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beware/error.hpp"

namespace beware {

/// A (user, item, rating) triplet as it arrives in the observation stream.
struct Observation {
  std::size_t user;
  std::size_t item;
  double rating;
};

/// One stored rating, keyed by the index on the other side of the matrix.
struct RatedEntry {
  std::size_t index;
  double rating;
};

struct RowRatings {
  std::vector<std::size_t> indices;
  std::vector<double> ratings;
};

/// Sparse matrix of observed ratings.
///
/// Each observation is stored twice: in the owning user's row and in the
/// item's column, both kept sorted by index. J(i) and I(j) are therefore
/// the index projections of those lists and can never drift from the set
/// of stored entries. Missing cells are simply absent.
///
/// Single writer, many readers.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  RatingMatrix(std::size_t n_users, std::size_t n_items);

  std::size_t n_users() const noexcept { return rows_.size(); }
  std::size_t n_items() const noexcept { return cols_.size(); }
  /// #S, the number of observed cells.
  std::size_t size() const noexcept { return count_; }

  /// Throws IndexOutOfRange, DuplicateObservation, or InvalidArgument for a
  /// non-finite rating. The matrix is left untouched on failure.
  void insert(const Observation& o);

  bool contains(std::size_t user, std::size_t item) const;
  std::optional<double> rating(std::size_t user, std::size_t item) const;

  // Ratings of user i (resp. on item j), ascending by item (resp. user).
  std::span<const RatedEntry> user_entries(std::size_t user) const;
  std::span<const RatedEntry> item_entries(std::size_t item) const;

  /// J(i) together with R_{i,J(i)}.
  RowRatings row_ratings(std::size_t user) const;
  /// I(j) together with R_{I(j),j}.
  RowRatings column_ratings(std::size_t item) const;

  std::size_t user_count(std::size_t user) const { return user_entries(user).size(); }
  std::size_t item_count(std::size_t item) const { return item_entries(item).size(); }

  /// Appends an empty row / column and returns its index.
  std::size_t add_user();
  std::size_t add_item();

  /// All observations in row-major order.
  std::vector<Observation> observations() const;

 private:
  std::vector<std::vector<RatedEntry>> rows_;
  std::vector<std::vector<RatedEntry>> cols_;
  std::size_t count_ = 0;
};

/// Dense oracle ratings with an availability mask. Immutable once built.
class GroundTruth {
 public:
  GroundTruth() = default;
  /// Fully available matrix. values is row-major, n_users * n_items.
  GroundTruth(std::size_t n_users, std::size_t n_items, std::vector<double> values);
  GroundTruth(std::size_t n_users, std::size_t n_items, std::vector<double> values,
              std::vector<bool> available);

  std::size_t n_users() const noexcept { return n_users_; }
  std::size_t n_items() const noexcept { return n_items_; }

  bool available(std::size_t user, std::size_t item) const;
  /// Throws Unavailable on a masked cell.
  double at(std::size_t user, std::size_t item) const;

  std::size_t available_count() const noexcept { return available_count_; }
  double fill_rate() const noexcept;

  /// Items with a known rating for this user, ascending.
  std::vector<std::size_t> available_items(std::size_t user) const;

 private:
  void check_index(std::size_t user, std::size_t item) const;

  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  std::vector<double> values_;
  std::vector<bool> available_;
  std::size_t available_count_ = 0;
};

enum class Regularization {
  Standard,  // sum ||U_i||^2 + sum ||V_j||^2
  Weighted,  // ALS-WR: each row's penalty scaled by its rating count
};

struct FitConfig {
  std::size_t rank = 5;
  double lambda = 0.05;
  Regularization regularization = Regularization::Weighted;
  std::size_t max_sweeps = 20;
  double objective_tolerance = 1e-6;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

}  // namespace beware
