#include "ontorag/statistics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "csv.h"
#include "ontorag/errors.h"

namespace ontorag {

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("no values to summarize");
  Summary s;
  s.n = values.size();
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(s.n);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(s.n));
  std::sort(values.begin(), values.end());
  s.median = values[(s.n - 1) / 2];
  return s;
}

RatingAggregate aggregate_ratings(const std::vector<RatingRecord>& records) {
  if (records.empty()) throw EmptyInput("no rating records");
  std::vector<double> correctness, completeness;
  for (const auto& r : records) {
    correctness.push_back(r.correctness);
    completeness.push_back(r.completeness);
  }
  return {summarize(std::move(correctness)), summarize(std::move(completeness))};
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts) {
  if (counts.empty()) throw EmptyInput("no rated items");
  const std::size_t k = counts.front().size();
  if (k == 0) throw EmptyInput("no rating categories");
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != k) throw UnequalRaterCounts("row " + std::to_string(i) + " has a different category count");
    std::size_t row = 0;
    for (auto c : counts[i]) row += c;
    if (i == 0) n = row;
    if (row != n) {
      throw UnequalRaterCounts("row " + std::to_string(i) + " has " + std::to_string(row) + " ratings, expected " +
                               std::to_string(n));
    }
  }
  if (n < 2) throw UnequalRaterCounts("at least two raters per item are required");

  const double N = static_cast<double>(counts.size());
  const double nn = static_cast<double>(n);
  std::vector<double> p(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : counts) {
    double agree = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double c = static_cast<double>(row[j]);
      p[j] += c;
      agree += c * c;
    }
    p_bar += (agree - nn) / (nn * (nn - 1.0));
  }
  p_bar /= N;
  double p_e = 0.0;
  for (double& pj : p) {
    pj /= N * nn;
    p_e += pj * pj;
  }
  if (1.0 - p_e <= 1e-15) {
    if (p_bar >= 1.0 - 1e-15) return 1.0;
    throw DegenerateAgreement("expected agreement is 1 but observed agreement is not");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

std::vector<std::vector<std::size_t>> rating_matrix(const std::vector<RatingRecord>& records,
                                                    RatingDimension dimension) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<std::size_t>> units;
  for (const auto& r : records) {
    auto& row = units[{r.item_id, r.variant, r.mode, r.format}];
    row.resize(5, 0);
    int score = dimension == RatingDimension::Correctness ? r.correctness : r.completeness;
    ++row[static_cast<std::size_t>(score)];
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [unit, row] : units) out.push_back(std::move(row));
  return out;
}

namespace {

int parse_score(const std::string& text, const char* column, std::size_t line_no) {
  std::size_t used = 0;
  int value = -1;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || value < 0 || value > 4) {
    throw ConfigError("ratings line " + std::to_string(line_no) + ": " + column + " must be an integer 0..4, got '" +
                      text + "'");
  }
  return value;
}

}  // namespace

std::vector<RatingRecord> parse_ratings_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> columns;
  std::vector<RatingRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = detail::split_csv_line(line, line_no);
    if (columns.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) columns[fields[i]] = i;
      for (const char* req : {"item_id", "rater", "correctness", "completeness"}) {
        if (!columns.count(req)) throw ConfigError(std::string("ratings header lacks column '") + req + "'");
      }
      continue;
    }
    if (fields.size() != columns.size()) {
      throw ConfigError("ratings line " + std::to_string(line_no) + ": expected " + std::to_string(columns.size()) +
                        " fields");
    }
    auto get = [&](const char* name) -> std::string {
      auto it = columns.find(name);
      return it == columns.end() ? std::string() : fields[it->second];
    };
    RatingRecord r;
    r.item_id = get("item_id");
    r.rater = get("rater");
    r.correctness = parse_score(get("correctness"), "correctness", line_no);
    r.completeness = parse_score(get("completeness"), "completeness", line_no);
    r.variant = get("variant");
    r.mode = get("mode");
    r.format = get("format");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RatingRecord> load_ratings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read ratings file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_ratings_csv(buffer.str());
}

}  // namespace ontorag
