#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontorag/evaluation.h"
#include "ontorag/statistics.h"

namespace ontorag {

std::string format_fixed(double value, int decimals);
std::string format_full(double value);  // round-trippable

// "Ont_A" ... "Ont_D" and "P_simple" ... "P_domain".
std::string variant_label(SelectionVariant variant);
std::string mode_label(PromptMode mode);

// Accuracy grid: one row per (mode, format), one column per variant.
// Budget-exceeded cells render "-", cells without any value "n/a", cells
// outside the grid stay blank. Two decimals.
std::string accuracy_table_markdown(const EvalReport& report);

// One line per cell with full-precision mean and per-repetition means.
std::string accuracy_csv(const EvalReport& report);

// One line per (cell, item, repetition).
std::string runs_csv(const EvalReport& report);

// Rating summary: one row per variant, a Mean/Med/Std triple per mode.
// Mean and Std with two decimals, Med with one.
std::string ratings_table_markdown(const std::vector<RatingRecord>& records, RatingDimension dimension,
                                   const std::vector<std::string>& modes = {"example", "domain"});

// Per-rating rows for box plots.
std::string boxplot_csv(const std::vector<RatingRecord>& records);

struct KappaSummary {
  std::optional<double> correctness;
  std::optional<double> completeness;
  std::string note;  // why a value is missing
};
KappaSummary kappa_summary(const std::vector<RatingRecord>& records);

std::string report_json(const EvalReport& report);

}  // namespace ontorag
