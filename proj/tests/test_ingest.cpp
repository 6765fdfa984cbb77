#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "beware/datagen.hpp"
#include "beware/ingest.hpp"

using namespace beware;

namespace {

RawRatingsFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("beware_test_" + name);
}

}  // namespace

TEST(Csv, PlainRows) {
  const auto raw = parse("u1,i3,3.0\nu1,i6,2.0");
  ASSERT_EQ(raw.records.size(), 2u);
  EXPECT_EQ(raw.records[0].user_id, "u1");
  EXPECT_EQ(raw.records[1].item_id, "i6");
  EXPECT_EQ(raw.records[1].rating, 2.0);
}

TEST(Csv, HeaderSkipped) {
  const auto raw = parse("user,item,rating\nu1,i1,4\n");
  ASSERT_EQ(raw.records.size(), 1u);
  EXPECT_EQ(raw.records[0].rating, 4.0);
}

TEST(Csv, BadRatingReportsLine) {
  try {
    parse("u1,i1,3\nu1,i1,abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Csv, WrongFieldCount) {
  try {
    parse("u1,i1,3\n\nu2,i2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, BomBlankLinesAndWhitespace) {
  const auto raw = parse("\xEF\xBB\xBFuser,item,rating\r\n\r\n a , b , 1.5 \r\n");
  ASSERT_EQ(raw.records.size(), 1u);
  EXPECT_EQ(raw.records[0].user_id, "a");
  EXPECT_EQ(raw.records[0].rating, 1.5);
}

TEST(Csv, MissingFile) {
  try {
    load_csv("/nonexistent/ratings.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Densify, FullGrid) {
  RawRatingsFile raw;
  for (int u = 0; u < 4; ++u) {
    for (int i = 0; i < 8; ++i) {
      raw.records.push_back({"u" + std::to_string(u), "i" + std::to_string(i), double(u + i)});
    }
  }
  const auto d = densify(raw, 4, 8);
  EXPECT_EQ(d.truth.n_users(), 4u);
  EXPECT_EQ(d.truth.n_items(), 8u);
  EXPECT_DOUBLE_EQ(d.fill_rate(), 1.0);
}

TEST(Densify, PopularItemKeepsBothUsers) {
  RawRatingsFile raw{{{"x", "a", 1}, {"x", "b", 2}, {"x", "c", 3}, {"y", "a", 4}}};
  const auto d = densify(raw, 10, 1);
  EXPECT_EQ(d.item_ids, std::vector<std::string>{"a"});
  EXPECT_EQ(d.truth.n_users(), 2u);
  EXPECT_DOUBLE_EQ(d.fill_rate(), 1.0);
}

TEST(Densify, LastDuplicateWinsAndTiesAreLexicographic) {
  RawRatingsFile raw{{{"u2", "b", 1}, {"u1", "a", 2}, {"u1", "a", 5}, {"u2", "a", 3}, {"u1", "b", 4}}};
  const auto d = densify(raw, 2, 2);
  EXPECT_EQ(d.item_ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.user_ids, (std::vector<std::string>{"u1", "u2"}));
  EXPECT_EQ(d.truth.at(0, 0), 5.0);
}

TEST(Densify, StableUnderPermutationAndBounded) {
  std::mt19937_64 rng(3);
  RawRatingsFile raw;
  for (int t = 0; t < 400; ++t) {
    raw.records.push_back({"u" + std::to_string(rng() % 30), "i" + std::to_string(rng() % 20),
                           double(1 + rng() % 5)});
  }
  // Permuting can reorder duplicates, so keep one record per cell first.
  std::sort(raw.records.begin(), raw.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.user_id, a.item_id) < std::tie(b.user_id, b.item_id);
  });
  raw.records.erase(std::unique(raw.records.begin(), raw.records.end(),
                                [](const auto& a, const auto& b) {
                                  return a.user_id == b.user_id && a.item_id == b.item_id;
                                }),
                    raw.records.end());
  const auto a = densify(raw, 12, 7);
  std::shuffle(raw.records.begin(), raw.records.end(), rng);
  const auto b = densify(raw, 12, 7);
  EXPECT_EQ(a.item_ids, b.item_ids);
  EXPECT_EQ(a.user_ids, b.user_ids);
  EXPECT_LE(a.truth.n_users(), 12u);
  EXPECT_LE(a.truth.n_items(), 7u);

  for (std::size_t i = 0; i < a.truth.n_users(); ++i) {
    for (std::size_t j = 0; j < a.truth.n_items(); ++j) {
      if (!a.truth.available(i, j)) continue;
      const auto it = std::find_if(raw.records.begin(), raw.records.end(), [&](const auto& r) {
        return r.user_id == a.user_ids[i] && r.item_id == a.item_ids[j];
      });
      ASSERT_NE(it, raw.records.end());
      EXPECT_EQ(it->rating, a.truth.at(i, j));
    }
  }
}

TEST(Densify, Errors) {
  try {
    densify({}, 3, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
  RawRatingsFile raw{{{"u", "i", 1}}};
  EXPECT_THROW(densify(raw, 0, 3), Error);
}

TEST(Csv, GroundTruthRoundTrip) {
  BlockModelSpec spec;
  spec.n_users = 6;
  spec.n_items = 4;
  spec.seed = 9;
  const auto gt = generate_ground_truth(spec);
  const auto path = temp_file("roundtrip.csv");
  write_ground_truth_csv(gt, path);
  const auto raw = load_csv(path);
  std::filesystem::remove(path);
  EXPECT_EQ(raw.records.size(), 24u);
  for (const auto& r : raw.records) {
    EXPECT_EQ(r.rating, gt.at(std::stoul(r.user_id), std::stoul(r.item_id)));
  }
}
