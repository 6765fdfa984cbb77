#include "beware/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beware {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::IndexOutOfRange: return "index out of range";
    case ErrorCode::DuplicateObservation: return "duplicate observation";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::SingularSystem: return "singular system";
    case ErrorCode::EmptyAllowedSet: return "empty allowed set";
    case ErrorCode::Unavailable: return "rating unavailable";
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::IoError: return "i/o error";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::LengthMismatch: return "length mismatch";
  }
  return "unknown error";
}

namespace {

auto lower_bound_by_index(const std::vector<RatedEntry>& list, std::size_t index) {
  return std::lower_bound(list.begin(), list.end(), index,
                          [](const RatedEntry& e, std::size_t k) { return e.index < k; });
}

RowRatings split(std::span<const RatedEntry> entries) {
  RowRatings out;
  out.indices.reserve(entries.size());
  out.ratings.reserve(entries.size());
  for (const auto& e : entries) {
    out.indices.push_back(e.index);
    out.ratings.push_back(e.rating);
  }
  return out;
}

}  // namespace

RatingMatrix::RatingMatrix(std::size_t n_users, std::size_t n_items)
    : rows_(n_users), cols_(n_items) {}

void RatingMatrix::insert(const Observation& o) {
  if (o.user >= n_users() || o.item >= n_items()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "observation (" + std::to_string(o.user) + ", " + std::to_string(o.item) +
                    ") outside " + std::to_string(n_users()) + "x" + std::to_string(n_items()));
  }
  if (!std::isfinite(o.rating)) {
    throw Error(ErrorCode::InvalidArgument, "rating must be finite");
  }
  auto& row = rows_[o.user];
  auto row_pos = lower_bound_by_index(row, o.item);
  if (row_pos != row.end() && row_pos->index == o.item) {
    throw Error(ErrorCode::DuplicateObservation,
                "(" + std::to_string(o.user) + ", " + std::to_string(o.item) + ") already observed");
  }
  auto& col = cols_[o.item];
  auto col_pos = lower_bound_by_index(col, o.user);
  row.insert(row_pos, RatedEntry{o.item, o.rating});
  col.insert(col_pos, RatedEntry{o.user, o.rating});
  ++count_;
}

bool RatingMatrix::contains(std::size_t user, std::size_t item) const {
  return rating(user, item).has_value();
}

std::optional<double> RatingMatrix::rating(std::size_t user, std::size_t item) const {
  if (user >= n_users() || item >= n_items()) return std::nullopt;
  const auto& row = rows_[user];
  auto pos = lower_bound_by_index(row, item);
  if (pos == row.end() || pos->index != item) return std::nullopt;
  return pos->rating;
}

std::span<const RatedEntry> RatingMatrix::user_entries(std::size_t user) const {
  if (user >= n_users()) {
    throw Error(ErrorCode::IndexOutOfRange, "user " + std::to_string(user) + " out of range");
  }
  return rows_[user];
}

std::span<const RatedEntry> RatingMatrix::item_entries(std::size_t item) const {
  if (item >= n_items()) {
    throw Error(ErrorCode::IndexOutOfRange, "item " + std::to_string(item) + " out of range");
  }
  return cols_[item];
}

RowRatings RatingMatrix::row_ratings(std::size_t user) const { return split(user_entries(user)); }

RowRatings RatingMatrix::column_ratings(std::size_t item) const {
  return split(item_entries(item));
}

std::size_t RatingMatrix::add_user() {
  rows_.emplace_back();
  return rows_.size() - 1;
}

std::size_t RatingMatrix::add_item() {
  cols_.emplace_back();
  return cols_.size() - 1;
}

std::vector<Observation> RatingMatrix::observations() const {
  std::vector<Observation> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (const auto& e : rows_[i]) out.push_back({i, e.index, e.rating});
  }
  return out;
}

GroundTruth::GroundTruth(std::size_t n_users, std::size_t n_items, std::vector<double> values)
    : GroundTruth(n_users, n_items, std::move(values), std::vector<bool>(n_users * n_items, true)) {}

GroundTruth::GroundTruth(std::size_t n_users, std::size_t n_items, std::vector<double> values,
                         std::vector<bool> available)
    : n_users_(n_users),
      n_items_(n_items),
      values_(std::move(values)),
      available_(std::move(available)) {
  if (values_.size() != n_users_ * n_items_ || available_.size() != n_users_ * n_items_) {
    throw Error(ErrorCode::DimensionMismatch, "ground truth storage does not match its shape");
  }
  for (std::size_t c = 0; c < values_.size(); ++c) {
    if (!available_[c]) continue;
    if (!std::isfinite(values_[c])) {
      throw Error(ErrorCode::InvalidArgument, "ground truth ratings must be finite");
    }
    ++available_count_;
  }
}

void GroundTruth::check_index(std::size_t user, std::size_t item) const {
  if (user >= n_users_ || item >= n_items_) {
    throw Error(ErrorCode::IndexOutOfRange,
                "cell (" + std::to_string(user) + ", " + std::to_string(item) + ") out of range");
  }
}

bool GroundTruth::available(std::size_t user, std::size_t item) const {
  check_index(user, item);
  return available_[user * n_items_ + item];
}

double GroundTruth::at(std::size_t user, std::size_t item) const {
  if (!available(user, item)) {
    throw Error(ErrorCode::Unavailable,
                "no ground truth for (" + std::to_string(user) + ", " + std::to_string(item) + ")");
  }
  return values_[user * n_items_ + item];
}

double GroundTruth::fill_rate() const noexcept {
  const std::size_t cells = n_users_ * n_items_;
  return cells == 0 ? 0.0 : static_cast<double>(available_count_) / static_cast<double>(cells);
}

std::vector<std::size_t> GroundTruth::available_items(std::size_t user) const {
  if (user >= n_users_) {
    throw Error(ErrorCode::IndexOutOfRange, "user " + std::to_string(user) + " out of range");
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_items_; ++j) {
    if (available_[user * n_items_ + j]) out.push_back(j);
  }
  return out;
}

void FitConfig::validate() const {
  if (rank < 1) throw Error(ErrorCode::InvalidArgument, "rank must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be finite and nonnegative");
  }
  if (max_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "max_sweeps must be at least 1");
  if (!(objective_tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "objective_tolerance must be nonnegative");
  }
}

}  // namespace beware
