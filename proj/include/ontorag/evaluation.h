#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ontorag/concept_index.h"
#include "ontorag/embedder.h"
#include "ontorag/enrichment.h"
#include "ontorag/iri.h"
#include "ontorag/llm_gateway.h"
#include "ontorag/ontology.h"
#include "ontorag/prompting.h"
#include "ontorag/representation.h"
#include "ontorag/selection.h"

namespace ontorag {

struct BenchmarkItem {
  std::string id;
  std::string persona;
  std::string question;
  std::string gold_sparql;
  std::string ontology_tag;
  std::optional<std::string> domain_example;
};

// One JSON object per non-blank line. Throws ConfigError naming the line.
std::vector<BenchmarkItem> parse_benchmark(std::string_view jsonl);
std::vector<BenchmarkItem> load_benchmark(const std::string& path);

// IRIs in subject, predicate or object position of the query's triple
// patterns. `prefixes` resolve undeclared prefixed names; the standard
// rdf/rdfs/owl/xsd prefixes are always available as a last resort.
// Throws ParseError.
std::set<Iri> extract_terms(std::string_view sparql, const std::map<std::string, std::string>& prefixes = {});

struct TermMatchResult {
  std::set<Iri> matches;
  std::set<Iri> mismatches;
  double accuracy = 1.0;
  bool empty = false;  // no terms at all; accuracy reported as 1.0
};

struct MatchOptions {
  bool standard_vocabulary_matches = true;  // rdf/rdfs/owl/xsd count as present
};

TermMatchResult hallucination_accuracy(const std::set<Iri>& terms, const std::set<Iri>& vocabulary,
                                       const MatchOptions& options = {});
TermMatchResult hallucination_accuracy(const std::set<Iri>& terms, const Ontology& ontology,
                                       const MatchOptions& options = {});

struct GridCell {
  SelectionVariant variant = SelectionVariant::OntA;
  Format format = Format::Graph;
  PromptMode mode = PromptMode::Simple;

  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

std::string to_string(const GridCell& cell);  // "OntA/graph/simple"

// All 4 x 3 x 3 cells in canonical order.
std::vector<GridCell> full_grid();

enum class RunOutcome { Ok, BudgetExceeded, NoQuery, ParseFailure, GenerationError };
std::string_view to_string(RunOutcome outcome);

struct ItemRun {
  GridCell cell;
  std::string item_id;
  unsigned repetition = 0;  // 0-based
  RunOutcome outcome = RunOutcome::Ok;
  std::optional<double> accuracy;  // Ok only
  TermMatchResult match;
  std::optional<int> auto_correctness;  // 0 for budget failures, 1 for unparseable output
  std::string sparql;
  std::string detail;  // error text for failures
  std::size_t prompt_tokens = 0;
  std::string prompt_key;
};

struct CellResult {
  GridCell cell;
  std::vector<std::optional<double>> repetition_means;  // macro-average over items
  std::optional<double> mean;                           // over repetitions that have a value
  std::size_t runs = 0;
  std::size_t budget_failures = 0;
  std::size_t parse_failures = 0;  // unparseable or absent query
  std::size_t other_failures = 0;
  bool budget_exceeded() const { return runs > 0 && budget_failures == runs; }
};

struct EvalReport {
  std::vector<CellResult> cells;  // in grid order
  std::vector<ItemRun> runs;      // ordered by cell, item, repetition
  unsigned repetitions = 0;
  std::size_t items = 0;

  const CellResult* find(const GridCell& cell) const;
};

struct BenchmarkConfig {
  SelectionConfig selection;
  std::size_t prompt_budget = 32000;
  unsigned repetitions = 5;
  bool include_descriptions = true;
  std::optional<std::string> generic_example;  // required by Example and Domain modes
  PromptTemplates templates;
  std::vector<EnrichmentRule> rules = default_enrichment_rules();
  MatchOptions match;
  unsigned threads = 1;
};

// Shared inputs. The naive index is built over the naive-reduced ontology,
// the full index over the whole ontology; either may be null when no cell
// needs it.
struct BenchmarkContext {
  const Ontology* ontology = nullptr;
  const Embedder* embedder = nullptr;
  const ConceptIndex* full_index = nullptr;
  const ConceptIndex* naive_index = nullptr;
};

// Prompt for one (cell, item), or the budget failure it produces.
struct PlannedPrompt {
  GridCell cell;
  std::string item_id;
  std::optional<PromptBundle> bundle;  // present unless an example was missing, even when over budget
  std::string failure;                 // BudgetExceeded or MissingExample text
  bool budget_exceeded = false;
  std::size_t token_estimate = 0;
};

// Builds every prompt of the grid without calling a backend.
std::vector<PlannedPrompt> plan_prompts(const std::vector<BenchmarkItem>& items, const std::vector<GridCell>& grid,
                                        const BenchmarkContext& context, const BenchmarkConfig& config);

// Full protocol. Prompts sharing a replay key run serially in (cell, item,
// repetition) order; distinct keys may run concurrently. ReplayMiss
// propagates; other per-run failures are recorded.
EvalReport run_benchmark(const std::vector<BenchmarkItem>& items, const std::vector<GridCell>& grid,
                         const BenchmarkContext& context, const BenchmarkConfig& config, TextGenerator& backend);

// Per-variant context for one question, before rendering.
Ontology select_context(SelectionVariant variant, std::string_view question, const BenchmarkContext& context,
                        const SelectionConfig& selection, const std::vector<EnrichmentRule>& rules);

}  // namespace ontorag
