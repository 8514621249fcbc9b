#include "ontorag/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "ontorag/errors.h"
#include "ontorag/sparql.h"
#include "ontorag/tokens.h"

namespace ontorag {

using nlohmann::json;

namespace {

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ConfigError("benchmark line " + std::to_string(line) + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

const std::map<std::string, std::string>& standard_prefixes() {
  static const std::map<std::string, std::string> prefixes = {
      {"rdf", std::string(vocab::kRdf)},
      {"rdfs", std::string(vocab::kRdfs)},
      {"owl", std::string(vocab::kOwl)},
      {"xsd", std::string(vocab::kXsd)},
  };
  return prefixes;
}

}  // namespace

std::vector<BenchmarkItem> parse_benchmark(std::string_view jsonl) {
  std::vector<BenchmarkItem> items;
  std::set<std::string> ids;
  std::istringstream in{std::string(jsonl)};
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("benchmark line " + std::to_string(line) + ": " + e.what());
    }
    if (!obj.is_object()) throw ConfigError("benchmark line " + std::to_string(line) + ": expected an object");
    BenchmarkItem item;
    item.id = required_string(obj, "id", line);
    item.persona = required_string(obj, "persona", line);
    item.question = required_string(obj, "question", line);
    item.gold_sparql = required_string(obj, "gold_sparql", line);
    item.ontology_tag = required_string(obj, "ontology_tag", line);
    if (auto it = obj.find("domain_example"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw ConfigError("benchmark line " + std::to_string(line) + ": domain_example must be text");
      item.domain_example = it->get<std::string>();
    }
    if (item.question.empty()) throw ConfigError("benchmark line " + std::to_string(line) + ": empty question");
    if (!ids.insert(item.id).second) throw ConfigError("benchmark line " + std::to_string(line) + ": duplicate id " + item.id);
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<BenchmarkItem> load_benchmark(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read benchmark file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_benchmark(buffer.str());
}

std::set<Iri> extract_terms(std::string_view sparql, const std::map<std::string, std::string>& prefixes) {
  std::map<std::string, std::string> fallback = standard_prefixes();
  for (const auto& [k, v] : prefixes) fallback[k] = v;
  return sparql::parse_query(sparql, fallback).pattern_terms;
}

TermMatchResult hallucination_accuracy(const std::set<Iri>& terms, const std::set<Iri>& vocabulary,
                                       const MatchOptions& options) {
  TermMatchResult r;
  for (const auto& t : terms) {
    bool present = vocabulary.count(t) || (options.standard_vocabulary_matches && vocab::is_standard(t));
    (present ? r.matches : r.mismatches).insert(t);
  }
  if (terms.empty()) {
    r.empty = true;
    r.accuracy = 1.0;
  } else {
    r.accuracy = static_cast<double>(r.matches.size()) / static_cast<double>(r.matches.size() + r.mismatches.size());
  }
  return r;
}

TermMatchResult hallucination_accuracy(const std::set<Iri>& terms, const Ontology& ontology,
                                       const MatchOptions& options) {
  return hallucination_accuracy(terms, vocabulary(ontology), options);
}

std::string to_string(const GridCell& cell) {
  return std::string(to_string(cell.variant)) + "/" + std::string(to_string(cell.format)) + "/" +
         std::string(to_string(cell.mode));
}

std::vector<GridCell> full_grid() {
  std::vector<GridCell> grid;
  for (auto v : {SelectionVariant::OntA, SelectionVariant::OntB, SelectionVariant::OntC, SelectionVariant::OntD}) {
    for (auto f : {Format::Graph, Format::Table, Format::TableSorted}) {
      for (auto m : {PromptMode::Simple, PromptMode::Example, PromptMode::Domain}) grid.push_back({v, f, m});
    }
  }
  return grid;
}

std::string_view to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Ok: return "ok";
    case RunOutcome::BudgetExceeded: return "budget-exceeded";
    case RunOutcome::NoQuery: return "no-query";
    case RunOutcome::ParseFailure: return "parse-failure";
    case RunOutcome::GenerationError: return "generation-error";
  }
  return "?";
}

const CellResult* EvalReport::find(const GridCell& cell) const {
  for (const auto& c : cells) {
    if (c.cell == cell) return &c;
  }
  return nullptr;
}

namespace {

const ConceptIndex& need(const ConceptIndex* index, const char* which) {
  if (index == nullptr) throw ConfigError(std::string("no ") + which + " concept index; run the index subcommand");
  return *index;
}

Ontology select_with(SelectionVariant variant, std::string_view question, const BenchmarkContext& context,
                     const Ontology& naive, const SelectionConfig& selection,
                     const std::vector<EnrichmentRule>& rules) {
  switch (variant) {
    case SelectionVariant::OntA:
      return naive;
    case SelectionVariant::OntB:
      return context_reduce(naive, question, need(context.naive_index, "naive"), *context.embedder, selection, false)
          .ontology;
    case SelectionVariant::OntC:
      return context_reduce(*context.ontology, question, need(context.full_index, "full"), *context.embedder,
                            selection, true)
          .ontology;
    case SelectionVariant::OntD:
      return enrich(context_reduce(*context.ontology, question, need(context.full_index, "full"), *context.embedder,
                                   selection, true)
                        .ontology,
                    rules);
  }
  return naive;
}

void check_context(const BenchmarkContext& context) {
  if (context.ontology == nullptr) throw ConfigError("benchmark context has no ontology");
  if (context.embedder == nullptr) throw ConfigError("benchmark context has no embedder");
}

}  // namespace

Ontology select_context(SelectionVariant variant, std::string_view question, const BenchmarkContext& context,
                        const SelectionConfig& selection, const std::vector<EnrichmentRule>& rules) {
  check_context(context);
  Ontology naive = variant == SelectionVariant::OntA || variant == SelectionVariant::OntB
                       ? naive_reduce(*context.ontology, selection).ontology
                       : Ontology{};
  return select_with(variant, question, context, naive, selection, rules);
}

std::vector<PlannedPrompt> plan_prompts(const std::vector<BenchmarkItem>& items, const std::vector<GridCell>& grid,
                                        const BenchmarkContext& context, const BenchmarkConfig& config) {
  check_context(context);
  config.selection.validate();
  bool needs_naive = std::any_of(grid.begin(), grid.end(), [](const GridCell& c) {
    return c.variant == SelectionVariant::OntA || c.variant == SelectionVariant::OntB;
  });
  Ontology naive = needs_naive ? naive_reduce(*context.ontology, config.selection).ontology : Ontology{};

  // Selections and renderings depend on (variant, item) and (variant, format,
  // item) only; cache them across prompt modes.
  std::map<std::pair<SelectionVariant, std::size_t>, Ontology> selections;
  std::map<std::tuple<SelectionVariant, Format, std::size_t>, RenderedContext> renders;

  std::vector<PlannedPrompt> plans;
  for (const auto& cell : grid) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& item = items[i];
      // OntA ignores the question; share a single selection.
      std::size_t sel_key = cell.variant == SelectionVariant::OntA ? 0 : i;
      auto sel = selections.find({cell.variant, sel_key});
      if (sel == selections.end()) {
        sel = selections
                  .emplace(std::make_pair(cell.variant, sel_key),
                           select_with(cell.variant, item.question, context, naive, config.selection, config.rules))
                  .first;
      }
      auto rk = std::make_tuple(cell.variant, cell.format, sel_key);
      auto rendered = renders.find(rk);
      if (rendered == renders.end()) {
        rendered = renders.emplace(rk, render(sel->second, cell.format, config.include_descriptions)).first;
      }

      PlannedPrompt plan;
      plan.cell = cell;
      plan.item_id = item.id;
      try {
        PromptBundle bundle = build_prompt(item.question, rendered->second, cell.mode, config.generic_example,
                                           item.domain_example, config.templates);
        bundle.variant = cell.variant;
        plan.token_estimate = bundle.token_estimate;
        plan.bundle = std::move(bundle);
        enforce_budget(*plan.bundle, config.prompt_budget);
      } catch (const BudgetExceeded& e) {
        plan.budget_exceeded = true;
        plan.failure = e.what();
      } catch (const MissingExample& e) {
        plan.failure = e.what();
      }
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

EvalReport run_benchmark(const std::vector<BenchmarkItem>& items, const std::vector<GridCell>& grid_in,
                         const BenchmarkContext& context, const BenchmarkConfig& config, TextGenerator& backend) {
  if (config.repetitions == 0) throw ConfigError("repetitions must be positive");
  std::vector<GridCell> grid;
  for (const auto& c : grid_in) {
    if (std::find(grid.begin(), grid.end(), c) == grid.end()) grid.push_back(c);
  }
  if (grid.empty()) throw ConfigError("benchmark grid is empty");

  auto plans = plan_prompts(items, grid, context, config);
  const auto vocab = vocabulary(*context.ontology);
  const auto& prefixes = context.ontology->prefixes;
  const unsigned reps = config.repetitions;

  std::vector<ItemRun> runs(plans.size() * reps);
  // Tasks sharing a prompt key go to one group, kept in run order, so the
  // replay cursor sequence is independent of thread scheduling.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    for (unsigned r = 0; r < reps; ++r) {
      std::size_t slot = p * reps + r;
      ItemRun& run = runs[slot];
      run.cell = plans[p].cell;
      run.item_id = plans[p].item_id;
      run.repetition = r;
      run.prompt_tokens = plans[p].token_estimate;
      if (!plans[p].bundle || plans[p].budget_exceeded) {
        run.outcome = plans[p].budget_exceeded ? RunOutcome::BudgetExceeded : RunOutcome::GenerationError;
        if (plans[p].budget_exceeded) run.auto_correctness = 0;
        run.detail = plans[p].failure;
        continue;
      }
      run.prompt_key = prompt_key(plans[p].bundle->text);
      groups[run.prompt_key].push_back(slot);
    }
  }
  std::vector<const std::vector<std::size_t>*> work;
  for (const auto& [key, slots] : groups) work.push_back(&slots);
  std::sort(work.begin(), work.end(), [](auto* a, auto* b) { return a->front() < b->front(); });

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr fatal;
  std::size_t fatal_slot = SIZE_MAX;

  auto execute = [&](std::size_t slot) {
    ItemRun& run = runs[slot];
    const PromptBundle& bundle = *plans[slot / reps].bundle;
    GenerationRecord record;
    try {
      record = generate(bundle, backend);
    } catch (const ReplayMiss&) {
      throw;
    } catch (const Error& e) {
      run.outcome = RunOutcome::GenerationError;
      run.detail = e.what();
      return;
    }
    if (!record.extracted_sparql) {
      run.outcome = RunOutcome::NoQuery;
      run.auto_correctness = 1;
      run.detail = "completion contains no SPARQL query";
      return;
    }
    run.sparql = *record.extracted_sparql;
    try {
      run.match = hallucination_accuracy(extract_terms(run.sparql, prefixes), vocab, config.match);
      run.accuracy = run.match.accuracy;
      run.outcome = RunOutcome::Ok;
    } catch (const ParseError& e) {
      run.outcome = RunOutcome::ParseFailure;
      run.auto_correctness = 1;
      run.detail = e.what();
    }
  };

  auto worker = [&] {
    while (!stop.load()) {
      std::size_t g = next.fetch_add(1);
      if (g >= work.size()) return;
      for (std::size_t slot : *work[g]) {
        try {
          execute(slot);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (slot < fatal_slot) {
            fatal_slot = slot;
            fatal = std::current_exception();
          }
          stop.store(true);
          return;
        }
      }
    }
  };

  unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  EvalReport report;
  report.repetitions = reps;
  report.items = items.size();
  for (std::size_t c = 0; c < grid.size(); ++c) {
    CellResult cell;
    cell.cell = grid[c];
    std::vector<double> sums(reps, 0.0);
    std::vector<std::size_t> counts(reps, 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (unsigned r = 0; r < reps; ++r) {
        const ItemRun& run = runs[(c * items.size() + i) * reps + r];
        ++cell.runs;
        switch (run.outcome) {
          case RunOutcome::Ok:
            sums[r] += *run.accuracy;
            ++counts[r];
            break;
          case RunOutcome::BudgetExceeded: ++cell.budget_failures; break;
          case RunOutcome::NoQuery:
          case RunOutcome::ParseFailure: ++cell.parse_failures; break;
          case RunOutcome::GenerationError: ++cell.other_failures; break;
        }
      }
    }
    double total = 0.0;
    std::size_t present = 0;
    for (unsigned r = 0; r < reps; ++r) {
      if (counts[r] == 0) {
        cell.repetition_means.push_back(std::nullopt);
        continue;
      }
      double m = sums[r] / static_cast<double>(counts[r]);
      cell.repetition_means.push_back(m);
      total += m;
      ++present;
    }
    if (present > 0) cell.mean = total / static_cast<double>(present);
    report.cells.push_back(std::move(cell));
  }
  report.runs = std::move(runs);
  return report;
}

}  // namespace ontorag
