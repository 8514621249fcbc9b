#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ontorag {

// One expert judgement. Scores are on the two 0..4 scales; variant, mode
// and format identify the generated query being judged and may be empty.
struct RatingRecord {
  std::string item_id;
  std::string rater;
  int correctness = 0;
  int completeness = 0;
  std::string variant;
  std::string mode;
  std::string format;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;  // lower-middle element for even counts
  double stddev = 0.0;  // population standard deviation
  std::size_t n = 0;
};

// Throws EmptyInput.
Summary summarize(std::vector<double> values);

struct RatingAggregate {
  Summary correctness;
  Summary completeness;
};

// Throws EmptyInput.
RatingAggregate aggregate_ratings(const std::vector<RatingRecord>& records);

// Fleiss' kappa over an items x categories matrix of rater counts. Every row
// must sum to the same n >= 2 (UnequalRaterCounts). When expected agreement
// is 1, returns 1 if observed agreement is 1 and throws DegenerateAgreement
// otherwise.
double fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts);

enum class RatingDimension { Correctness, Completeness };

// Rows are rated units (item_id, variant, mode, format), in sorted order;
// columns are the scores 0..4.
std::vector<std::vector<std::size_t>> rating_matrix(const std::vector<RatingRecord>& records,
                                                    RatingDimension dimension);

// CSV with header; required columns item_id, rater, correctness,
// completeness; optional variant, mode, format. Throws ConfigError.
std::vector<RatingRecord> parse_ratings_csv(std::string_view text);
std::vector<RatingRecord> load_ratings(const std::string& path);

}  // namespace ontorag
