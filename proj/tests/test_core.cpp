#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "beware/core.hpp"
#include "oracle.hpp"

using namespace beware;

namespace {

std::vector<std::size_t> indices(std::span<const RatedEntry> entries) {
  std::vector<std::size_t> out;
  for (const auto& e : entries) out.push_back(e.index);
  return out;
}

}  // namespace

TEST(RatingMatrix, InsertUpdatesBothSides) {
  RatingMatrix m(4, 8);
  m.insert({2, 1, 1});
  EXPECT_EQ(indices(m.user_entries(2)), std::vector<std::size_t>{1});
  EXPECT_EQ(indices(m.item_entries(1)), std::vector<std::size_t>{2});
  EXPECT_EQ(m.size(), 1u);
}

TEST(RatingMatrix, RowKeepsAscendingOrder) {
  RatingMatrix m(4, 8);
  m.insert({1, 6, 2});
  m.insert({1, 3, 3});
  EXPECT_EQ(m.row_ratings(1).indices, (std::vector<std::size_t>{3, 6}));
  EXPECT_EQ(m.row_ratings(1).ratings, (std::vector<double>{3, 2}));
}

TEST(RatingMatrix, DuplicateRejectedAndStateKept) {
  RatingMatrix m(4, 8);
  m.insert({2, 1, 1});
  try {
    m.insert({2, 1, 4});
    FAIL() << "expected DuplicateObservation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateObservation);
  }
  EXPECT_EQ(m.size(), 1u);
  EXPECT_EQ(m.rating(2, 1), 1.0);
}

TEST(RatingMatrix, OutOfRangeAndNonFinite) {
  RatingMatrix m(4, 8);
  auto code_of = [&](Observation o) {
    try {
      m.insert(o);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of({4, 0, 1}), ErrorCode::IndexOutOfRange);
  EXPECT_EQ(code_of({0, 8, 1}), ErrorCode::IndexOutOfRange);
  EXPECT_THROW(m.insert({0, 0, std::nan("")}), Error);
  EXPECT_EQ(m.size(), 0u);
  EXPECT_THROW(m.row_ratings(4), Error);
}

TEST(RatingMatrix, ExampleRow) {
  const auto m = fixtures::example_matrix();
  const auto row = m.row_ratings(1);
  EXPECT_EQ(row.indices, (std::vector<std::size_t>{0, 3, 5}));
  EXPECT_EQ(row.ratings, (std::vector<double>{1, 3, 5}));
  EXPECT_EQ(m.size(), 9u);
}

TEST(RatingMatrix, ColdUserIsEmpty) {
  RatingMatrix m(3, 3);
  m.insert({0, 0, 4.5});
  const auto cold = m.row_ratings(2);
  EXPECT_TRUE(cold.indices.empty());
  EXPECT_TRUE(cold.ratings.empty());
  const auto single = m.row_ratings(0);
  EXPECT_EQ(single.indices, std::vector<std::size_t>{0});
  EXPECT_EQ(single.ratings, std::vector<double>{4.5});
}

TEST(RatingMatrix, GrowthAppends) {
  RatingMatrix m(2, 2);
  EXPECT_EQ(m.add_user(), 2u);
  EXPECT_EQ(m.add_item(), 2u);
  m.insert({2, 2, 3});
  EXPECT_EQ(m.n_users(), 3u);
  EXPECT_EQ(m.n_items(), 3u);
  EXPECT_EQ(m.user_count(2), 1u);
}

TEST(RatingMatrixProperty, IndexListsMatchRebuild) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t m = 1 + rng() % 12;
    RatingMatrix r(n, m);
    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    for (int step = 0; step < 60; ++step) {
      const std::size_t i = rng() % n;
      const std::size_t j = rng() % m;
      const double v = static_cast<double>(rng() % 5 + 1);
      if (entries.count({i, j})) {
        EXPECT_THROW(r.insert({i, j, v}), Error);
      } else {
        r.insert({i, j, v});
        entries[{i, j}] = v;
      }
    }
    std::size_t user_sum = 0;
    std::size_t item_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> expected;
      for (const auto& [key, v] : entries) {
        if (key.first == i) expected.push_back(key.second);
      }
      EXPECT_EQ(r.row_ratings(i).indices, expected);
      user_sum += r.user_count(i);
    }
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<std::size_t> expected;
      for (const auto& [key, v] : entries) {
        if (key.second == j) expected.push_back(key.first);
      }
      EXPECT_EQ(r.column_ratings(j).indices, expected);
      item_sum += r.item_count(j);
    }
    EXPECT_EQ(user_sum, r.size());
    EXPECT_EQ(item_sum, r.size());
    EXPECT_EQ(r.size(), entries.size());
    EXPECT_EQ(r.row_ratings(0).indices, r.row_ratings(0).indices);
  }
}

TEST(GroundTruth, MaskAndAccess) {
  GroundTruth gt(2, 3, {1, 2, 3, 4, 5, 1}, {true, false, true, true, true, false});
  EXPECT_TRUE(gt.available(0, 0));
  EXPECT_FALSE(gt.available(0, 1));
  EXPECT_DOUBLE_EQ(gt.at(1, 1), 5.0);
  try {
    gt.at(0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unavailable);
  }
  EXPECT_EQ(gt.available_count(), 4u);
  EXPECT_DOUBLE_EQ(gt.fill_rate(), 4.0 / 6.0);
  EXPECT_EQ(gt.available_items(1), (std::vector<std::size_t>{0, 1}));
}

TEST(GroundTruth, RejectsWrongSize) {
  try {
    GroundTruth gt(2, 2, {1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(FitConfig, Validation) {
  FitConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rank = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.lambda = -1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.objective_tolerance = -1e-3;
  EXPECT_THROW(cfg.validate(), Error);
}
