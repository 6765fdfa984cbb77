#include "beware/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string_view>
#include <unordered_map>

namespace beware {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct Ranked {
  std::string id;
  std::size_t count;
};

// Most ratings first, ties to the smaller id.
void rank(std::vector<Ranked>& v) {
  std::sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.id < b.id;
  });
}

}  // namespace

RawRatingsFile parse_csv(std::istream& in) {
  RawRatingsFile out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;

    const auto fields = split_fields(view);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    }
    const auto value = parse_number(fields[2]);
    if (first_content_line) {
      first_content_line = false;
      if (!value) continue;  // header
    }
    if (!value) throw ParseError(line_no, "rating '" + std::string(fields[2]) + "' is not a number");
    if (!std::isfinite(*value)) throw ParseError(line_no, "rating is not finite");
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty id");
    out.records.push_back({std::string(fields[0]), std::string(fields[1]), *value});
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failure");
  return out;
}

RawRatingsFile load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_csv(in);
}

DensifiedData densify(const RawRatingsFile& raw, std::size_t top_users, std::size_t top_items) {
  if (top_users < 1 || top_items < 1) {
    throw Error(ErrorCode::InvalidArgument, "top_users and top_items must be at least 1");
  }
  if (raw.records.empty()) throw Error(ErrorCode::InsufficientData, "no ratings");

  // Last occurrence wins.
  std::map<std::pair<std::string, std::string>, double> cells;
  for (const auto& r : raw.records) cells[{r.user_id, r.item_id}] = r.rating;

  std::map<std::string, std::size_t> item_counts;
  for (const auto& [key, _] : cells) ++item_counts[key.second];
  std::vector<Ranked> items;
  for (const auto& [id, count] : item_counts) items.push_back({id, count});
  rank(items);
  if (items.size() > top_items) items.resize(top_items);

  std::unordered_map<std::string, std::size_t> item_column;
  for (std::size_t c = 0; c < items.size(); ++c) item_column[items[c].id] = c;

  std::map<std::string, std::size_t> user_counts;
  for (const auto& [key, _] : cells) {
    if (item_column.contains(key.second)) ++user_counts[key.first];
  }
  std::vector<Ranked> users;
  for (const auto& [id, count] : user_counts) users.push_back({id, count});
  rank(users);
  if (users.size() > top_users) users.resize(top_users);
  if (users.empty() || items.empty()) {
    throw Error(ErrorCode::InsufficientData, "densification selected an empty matrix");
  }

  std::unordered_map<std::string, std::size_t> user_row;
  for (std::size_t r = 0; r < users.size(); ++r) user_row[users[r].id] = r;

  const std::size_t n = users.size();
  const std::size_t m = items.size();
  std::vector<double> values(n * m, 0.0);
  std::vector<bool> mask(n * m, false);
  for (const auto& [key, rating] : cells) {
    const auto u = user_row.find(key.first);
    const auto it = item_column.find(key.second);
    if (u == user_row.end() || it == item_column.end()) continue;
    values[u->second * m + it->second] = rating;
    mask[u->second * m + it->second] = true;
  }

  DensifiedData out{GroundTruth(n, m, std::move(values), std::move(mask)), {}, {}};
  for (auto& u : users) out.user_ids.push_back(std::move(u.id));
  for (auto& i : items) out.item_ids.push_back(std::move(i.id));
  return out;
}

void write_ground_truth_csv(const GroundTruth& truth, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "user,item,rating\n";
  for (std::size_t i = 0; i < truth.n_users(); ++i) {
    for (std::size_t j = 0; j < truth.n_items(); ++j) {
      if (truth.available(i, j)) out << i << ',' << j << ',' << truth.at(i, j) << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

}  // namespace beware
