#include "ontorag/report.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "csv.h"
#include "ontorag/errors.h"

namespace ontorag {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string variant_label(SelectionVariant variant) {
  std::string tag(to_string(variant));
  return tag.substr(0, 3) + "_" + tag.substr(3);
}

std::string mode_label(PromptMode mode) { return "P_" + std::string(to_string(mode)); }

namespace {

using detail::csv_field;

std::string opt_full(const std::optional<double>& v) { return v ? format_full(*v) : ""; }

std::string normalized_mode(const std::string& text) {
  std::string s;
  for (char c : text) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s.rfind("p_", 0) == 0) s = s.substr(2);
  return s;
}

std::string normalized_variant(const std::string& text) {
  auto v = parse_variant(text);
  return v ? variant_label(*v) : text;
}

}  // namespace

std::string accuracy_table_markdown(const EvalReport& report) {
  static const SelectionVariant kVariants[] = {SelectionVariant::OntA, SelectionVariant::OntB,
                                               SelectionVariant::OntC, SelectionVariant::OntD};
  static const PromptMode kModes[] = {PromptMode::Simple, PromptMode::Example, PromptMode::Domain};
  static const Format kFormats[] = {Format::Graph, Format::Table, Format::TableSorted};

  std::vector<SelectionVariant> variants;
  for (auto v : kVariants) {
    if (std::any_of(report.cells.begin(), report.cells.end(), [&](const CellResult& c) { return c.cell.variant == v; }))
      variants.push_back(v);
  }
  std::ostringstream out;
  out << "| Accuracy |";
  for (auto v : variants) out << ' ' << variant_label(v) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < variants.size(); ++i) out << "---|";
  out << '\n';
  for (auto m : kModes) {
    for (auto f : kFormats) {
      bool any = std::any_of(report.cells.begin(), report.cells.end(),
                             [&](const CellResult& c) { return c.cell.mode == m && c.cell.format == f; });
      if (!any) continue;
      out << "| " << mode_label(m) << '(' << to_string(f) << ") |";
      for (auto v : variants) {
        const CellResult* cell = report.find({v, f, m});
        std::string text;
        if (cell == nullptr) {
          text = "";
        } else if (cell->budget_exceeded()) {
          text = "-";
        } else if (cell->mean) {
          text = format_fixed(*cell->mean, 2);
        } else {
          text = "n/a";
        }
        out << ' ' << text << " |";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string accuracy_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "variant,format,mode,mean";
  for (unsigned r = 0; r < report.repetitions; ++r) out << ",rep" << (r + 1);
  out << ",runs,budget_failures,parse_failures,other_failures\n";
  for (const auto& c : report.cells) {
    out << to_string(c.cell.variant) << ',' << to_string(c.cell.format) << ',' << to_string(c.cell.mode) << ','
        << (c.budget_exceeded() ? "-" : opt_full(c.mean));
    for (const auto& m : c.repetition_means) out << ',' << opt_full(m);
    out << ',' << c.runs << ',' << c.budget_failures << ',' << c.parse_failures << ',' << c.other_failures << '\n';
  }
  return out.str();
}

std::string runs_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "variant,format,mode,item_id,repetition,outcome,accuracy,matches,mismatches,auto_correctness,"
         "prompt_tokens,invented,detail\n";
  for (const auto& r : report.runs) {
    std::string invented;
    for (const auto& iri : r.match.mismatches) {
      if (!invented.empty()) invented += ' ';
      invented += iri.str();
    }
    out << to_string(r.cell.variant) << ',' << to_string(r.cell.format) << ',' << to_string(r.cell.mode) << ','
        << csv_field(r.item_id) << ',' << (r.repetition + 1) << ',' << to_string(r.outcome) << ','
        << opt_full(r.accuracy) << ',' << r.match.matches.size() << ',' << r.match.mismatches.size() << ','
        << (r.auto_correctness ? std::to_string(*r.auto_correctness) : "") << ',' << r.prompt_tokens << ','
        << csv_field(invented) << ',' << csv_field(r.detail) << '\n';
  }
  return out.str();
}

std::string ratings_table_markdown(const std::vector<RatingRecord>& records, RatingDimension dimension,
                                   const std::vector<std::string>& modes) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::set<std::string> variants;
  for (const auto& r : records) {
    auto v = normalized_variant(r.variant);
    variants.insert(v);
    groups[{v, normalized_mode(r.mode)}].push_back(
        dimension == RatingDimension::Correctness ? r.correctness : r.completeness);
  }
  std::ostringstream out;
  out << "| |";
  for (const auto& m : modes) out << " P_" << normalized_mode(m) << " Mean | Med | Std |";
  out << "\n|---|";
  for (std::size_t i = 0; i < modes.size(); ++i) out << "---|---|---|";
  out << '\n';
  for (const auto& v : variants) {
    out << "| " << v << " |";
    for (const auto& m : modes) {
      auto it = groups.find({v, normalized_mode(m)});
      if (it == groups.end()) {
        out << " - | - | - |";
        continue;
      }
      Summary s = summarize(it->second);
      out << ' ' << format_fixed(s.mean, 2) << " | " << format_fixed(s.median, 1) << " | "
          << format_fixed(s.stddev, 2) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string boxplot_csv(const std::vector<RatingRecord>& records) {
  std::vector<RatingRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const RatingRecord& a, const RatingRecord& b) {
    return std::tie(a.variant, a.mode, a.format, a.item_id, a.rater) <
           std::tie(b.variant, b.mode, b.format, b.item_id, b.rater);
  });
  std::ostringstream out;
  out << "variant,mode,format,item_id,rater,correctness,completeness\n";
  for (const auto& r : sorted) {
    out << csv_field(normalized_variant(r.variant)) << ',' << csv_field(r.mode) << ',' << csv_field(r.format) << ','
        << csv_field(r.item_id) << ',' << csv_field(r.rater) << ',' << r.correctness << ',' << r.completeness << '\n';
  }
  return out.str();
}

KappaSummary kappa_summary(const std::vector<RatingRecord>& records) {
  KappaSummary k;
  auto one = [&](RatingDimension d, std::optional<double>& slot) {
    try {
      slot = fleiss_kappa(rating_matrix(records, d));
    } catch (const Error& e) {
      if (!k.note.empty()) k.note += "; ";
      k.note += (d == RatingDimension::Correctness ? "correctness: " : "completeness: ") + std::string(e.what());
    }
  };
  one(RatingDimension::Correctness, k.correctness);
  one(RatingDimension::Completeness, k.completeness);
  return k;
}

std::string report_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["repetitions"] = report.repetitions;
  doc["items"] = report.items;
  auto& cells = doc["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json j;
    j["variant"] = to_string(c.cell.variant);
    j["format"] = to_string(c.cell.format);
    j["mode"] = to_string(c.cell.mode);
    j["mean"] = c.mean ? nlohmann::json(*c.mean) : nlohmann::json(nullptr);
    j["budget_exceeded"] = c.budget_exceeded();
    auto& reps = j["repetition_means"] = nlohmann::json::array();
    for (const auto& m : c.repetition_means) reps.push_back(m ? nlohmann::json(*m) : nlohmann::json(nullptr));
    j["runs"] = c.runs;
    j["budget_failures"] = c.budget_failures;
    j["parse_failures"] = c.parse_failures;
    j["other_failures"] = c.other_failures;
    cells.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace ontorag
