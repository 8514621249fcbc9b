#include "ontorag/cli.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.h"
#include "ontorag/concept_index.h"
#include "ontorag/embedder.h"
#include "ontorag/enrichment.h"
#include "ontorag/errors.h"
#include "ontorag/evaluation.h"
#include "ontorag/llm_gateway.h"
#include "ontorag/ontology.h"
#include "ontorag/prompting.h"
#include "ontorag/report.h"
#include "ontorag/representation.h"
#include "ontorag/selection.h"
#include "ontorag/statistics.h"

namespace ontorag {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Usage or configuration problem; exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Settings {
  std::string config;
  std::string ontology;
  std::string benchmark;
  std::string index;
  std::string naive_index;
  std::string out;
  std::string out_dir = "report";
  std::string basis = "full";
  std::string question;
  bool interactive = false;
  std::string variant = "OntA";
  std::string format = "graph";
  std::string mode = "simple";
  std::vector<std::string> variants;
  std::vector<std::string> formats;
  std::vector<std::string> modes;
  bool no_descriptions = false;
  std::size_t top_k = 25;
  std::size_t token_budget = 32000;
  std::size_t prompt_budget = 32000;
  unsigned repetitions = 5;
  unsigned threads = 1;
  std::string backend = "mock";
  std::string fixtures;
  std::string mock_completion;
  bool mock_gold = false;
  std::string model = "gpt-4";
  std::string endpoint;
  std::string api_key_env = "ONTORAG_API_KEY";
  double temperature = 0.0;
  unsigned timeout_ms = 60000;
  unsigned max_retries = 3;
  unsigned max_in_flight = 4;
  std::string embedder = "lexical";
  std::string embedding_endpoint;
  std::string embedding_model;
  std::string generic_example_file;
  std::string domain_example_file;
  std::string rules;
  std::string templates;
  std::string dump_prompts;
  std::string ratings;
  std::string runs;
  std::string raters = "rater1,rater2,rater3";
  std::string dimension = "correctness";
  std::string boxplot;
};

// ---- config file

using Setter = std::function<void(Settings&, const json&, const fs::path&)>;

template <class T>
Setter plain(T Settings::*field) {
  return [field](Settings& s, const json& v, const fs::path&) { s.*field = v.get<T>(); };
}

Setter path(std::string Settings::*field) {
  return [field](Settings& s, const json& v, const fs::path& base) {
    fs::path p(v.get<std::string>());
    s.*field = (p.is_absolute() || base.empty() ? p : base / p).lexically_normal().string();
  };
}

Setter list(std::vector<std::string> Settings::*field) {
  return [field](Settings& s, const json& v, const fs::path&) {
    s.*field = v.is_string() ? std::vector<std::string>{v.get<std::string>()} : v.get<std::vector<std::string>>();
  };
}

const std::map<std::string, Setter>& config_keys() {
  static const std::map<std::string, Setter> keys = {
      {"ontology", path(&Settings::ontology)},
      {"benchmark", path(&Settings::benchmark)},
      {"index", path(&Settings::index)},
      {"naive_index", path(&Settings::naive_index)},
      {"out", path(&Settings::out)},
      {"out_dir", path(&Settings::out_dir)},
      {"basis", plain(&Settings::basis)},
      {"question", plain(&Settings::question)},
      {"variant", plain(&Settings::variant)},
      {"format", plain(&Settings::format)},
      {"mode", plain(&Settings::mode)},
      {"variants", list(&Settings::variants)},
      {"formats", list(&Settings::formats)},
      {"modes", list(&Settings::modes)},
      {"no_descriptions", plain(&Settings::no_descriptions)},
      {"top_k", plain(&Settings::top_k)},
      {"token_budget", plain(&Settings::token_budget)},
      {"prompt_budget", plain(&Settings::prompt_budget)},
      {"repetitions", plain(&Settings::repetitions)},
      {"threads", plain(&Settings::threads)},
      {"backend", plain(&Settings::backend)},
      {"fixtures", path(&Settings::fixtures)},
      {"mock_completion", plain(&Settings::mock_completion)},
      {"mock_gold", plain(&Settings::mock_gold)},
      {"model", plain(&Settings::model)},
      {"endpoint", plain(&Settings::endpoint)},
      {"api_key_env", plain(&Settings::api_key_env)},
      {"temperature", plain(&Settings::temperature)},
      {"timeout_ms", plain(&Settings::timeout_ms)},
      {"max_retries", plain(&Settings::max_retries)},
      {"max_in_flight", plain(&Settings::max_in_flight)},
      {"embedder", plain(&Settings::embedder)},
      {"embedding_endpoint", plain(&Settings::embedding_endpoint)},
      {"embedding_model", plain(&Settings::embedding_model)},
      {"generic_example_file", path(&Settings::generic_example_file)},
      {"domain_example_file", path(&Settings::domain_example_file)},
      {"rules", path(&Settings::rules)},
      {"templates", path(&Settings::templates)},
      {"dump_prompts", path(&Settings::dump_prompts)},
      {"ratings", path(&Settings::ratings)},
      {"runs", path(&Settings::runs)},
      {"raters", plain(&Settings::raters)},
      {"dimension", plain(&Settings::dimension)},
      {"boxplot", path(&Settings::boxplot)},
  };
  return keys;
}

std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw UsageError("cannot read " + file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void apply_config(Settings& s, const std::string& file) {
  json doc;
  try {
    doc = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw UsageError("config " + file + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config " + file + ": expected a JSON object");
  fs::path base = fs::path(file).parent_path();
  for (const auto& [key, value] : doc.items()) {
    auto it = config_keys().find(key);
    if (it == config_keys().end()) throw UsageError("config " + file + ": unknown key '" + key + "'");
    try {
      it->second(s, value, base);
    } catch (const json::exception& e) {
      throw UsageError("config " + file + ": bad value for '" + key + "': " + e.what());
    }
  }
}

// Options write into a scratch Settings; after parsing, explicitly given
// flags are copied over the config-file values.
class FlagSet {
 public:
  template <class T>
  CLI::Option* option(CLI::App* app, const std::string& name, T Settings::*field, const std::string& help) {
    auto* opt = app->add_option(name, flags_.*field, help);
    copies_.push_back({opt, [field](Settings& dst, const Settings& src) { dst.*field = src.*field; }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, bool Settings::*field, const std::string& help) {
    auto* opt = app->add_flag(name, flags_.*field, help);
    copies_.push_back({opt, [field](Settings& dst, const Settings& src) { dst.*field = src.*field; }});
    return opt;
  }

  Settings merged() const {
    Settings s;
    if (!flags_.config.empty()) apply_config(s, flags_.config);
    for (const auto& [opt, copy] : copies_) {
      if (opt->count() > 0) copy(s, flags_);
    }
    return s;
  }

  Settings& raw() { return flags_; }

 private:
  Settings flags_;
  std::vector<std::pair<CLI::Option*, std::function<void(Settings&, const Settings&)>>> copies_;
};

// ---- shared plumbing

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError("missing required " + flag);
}

void write_output(const std::string& file, const std::string& text, std::ostream& out) {
  if (file.empty() || file == "-") {
    out << text;
    return;
  }
  std::ofstream f(file, std::ios::binary);
  if (!f) throw UsageError("cannot write " + file);
  f << text;
}

Ontology load_onto(const Settings& s) {
  require(s.ontology, "--ontology");
  if (s.ontology != "-" && !fs::exists(s.ontology)) throw UsageError("ontology file not found: " + s.ontology);
  return load_ontology(s.ontology);
}

SelectionVariant variant_of(const std::string& text) {
  auto v = parse_variant(text);
  if (!v) throw UsageError("unknown variant '" + text + "' (expected OntA, OntB, OntC or OntD)");
  return *v;
}

Format format_of(const std::string& text) {
  auto f = parse_format(text);
  if (!f) throw UsageError("unknown format '" + text + "' (expected graph, table or table-sorted)");
  return *f;
}

PromptMode mode_of(const std::string& text) {
  auto m = parse_mode(text);
  if (!m) throw UsageError("unknown prompt mode '" + text + "' (expected simple, example or domain)");
  return *m;
}

SelectionConfig selection_of(const Settings& s) {
  SelectionConfig c;
  c.top_k = s.top_k;
  c.token_budget = s.token_budget;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::unique_ptr<Embedder> embedder_of(const Settings& s) {
  if (s.embedder == "lexical") return std::make_unique<LexicalEmbedder>();
  if (s.embedder == "http") {
    HttpEmbedder::Options o;
    o.endpoint = s.embedding_endpoint.empty() ? s.endpoint : s.embedding_endpoint;
    o.model = s.embedding_model;
    o.api_key_env = s.api_key_env;
    require(o.endpoint, "--embedding-endpoint");
    require(o.model, "--embedding-model");
    return std::make_unique<HttpEmbedder>(o);
  }
  throw UsageError("unknown embedder '" + s.embedder + "' (expected lexical or http)");
}

std::optional<std::string> optional_file(const std::string& file) {
  if (file.empty()) return std::nullopt;
  std::string text = read_file(file);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

ConceptIndex load_checked_index(const std::string& file, const std::string& basis, const Ontology& ontology,
                                const Embedder& embedder) {
  if (!fs::exists(file)) {
    throw UsageError("index file not found: " + file + "; build it with `ontorag index --basis " + basis + "`");
  }
  ConceptIndex index = load_index(file);
  if (index.basis != basis) {
    throw UsageError("index " + file + " was built with basis '" + index.basis + "', expected '" + basis + "'");
  }
  if (index.embedder != embedder.name()) {
    throw UsageError("index " + file + " was built with embedder '" + index.embedder + "', current embedder is '" +
                     embedder.name() + "'");
  }
  check_index_against(index, ontology);
  return index;
}

std::unique_ptr<TextGenerator> backend_of(const Settings& s, const std::vector<BenchmarkItem>* items) {
  auto kind = parse_backend(s.backend);
  if (!kind) throw UsageError("unknown backend '" + s.backend + "' (expected http, replay or mock)");
  switch (*kind) {
    case BackendKind::Mock:
      if (s.mock_gold) {
        if (items == nullptr) throw UsageError("--mock-gold needs a benchmark");
        std::map<std::string, std::string> gold;
        for (const auto& it : *items) gold[it.question] = it.gold_sparql;
        return std::make_unique<MockBackend>([gold](const PromptBundle& b) {
          auto it = gold.find(b.question);
          return it == gold.end() ? std::string() : it->second;
        });
      }
      return std::make_unique<MockBackend>(s.mock_completion);
    case BackendKind::Replay:
      require(s.fixtures, "--fixtures for the replay backend");
      return std::make_unique<ReplayBackend>(ReplayBackend::load_fixtures(s.fixtures));
    case BackendKind::Http: {
      GenerationConfig g;
      g.backend = BackendKind::Http;
      g.model_name = s.model;
      g.endpoint = s.endpoint;
      g.api_key_env = s.api_key_env;
      g.temperature = s.temperature;
      g.timeout = std::chrono::milliseconds(s.timeout_ms);
      g.max_retries = s.max_retries;
      g.max_in_flight = s.max_in_flight;
      try {
        g.validate();
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      return std::make_unique<HttpChatBackend>(g);
    }
  }
  throw UsageError("unsupported backend");
}

std::string format_accuracy(double v) {
  std::string s = format_fixed(v, 4);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s += '0';
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Indexes needed by the variants in play, loaded from disk when configured,
// else built in memory with the active embedder.
struct Indexes {
  std::optional<ConceptIndex> full;
  std::optional<ConceptIndex> naive;
};

Indexes prepare_indexes(const Settings& s, const Ontology& onto, const Embedder& embedder,
                        const SelectionConfig& selection, bool need_full, bool need_naive, bool build_missing,
                        const std::string& subcommand) {
  Indexes ix;
  auto missing = [&](const std::string& basis, const std::string& flag) {
    throw UsageError("variant needs a " + basis + " concept index but none was given; build one with `ontorag index "
                     "--ontology " + (s.ontology.empty() ? std::string("<file>") : s.ontology) + " --basis " + basis +
                     " --out <file>` and pass " + flag + " to `ontorag " + subcommand + "`");
  };
  if (need_full) {
    if (!s.index.empty()) {
      ix.full = load_checked_index(s.index, "full", onto, embedder);
    } else if (build_missing) {
      ix.full = build_concept_index(onto, embedder, "full", s.threads);
    } else {
      missing("full", "--index");
    }
  }
  if (need_naive) {
    Ontology naive = naive_reduce(onto, selection).ontology;
    if (!s.naive_index.empty()) {
      ix.naive = load_checked_index(s.naive_index, "naive", naive, embedder);
    } else if (build_missing) {
      ix.naive = build_concept_index(naive, embedder, "naive", s.threads);
    } else {
      missing("naive", "--naive-index");
    }
  }
  return ix;
}

// ---- subcommands

int cmd_ingest(const Settings& s, std::ostream& out) {
  Ontology onto;
  try {
    onto = load_onto(s);
  } catch (const SyntaxError& e) {
    throw UsageError(s.ontology + ": " + e.what());
  }
  out << onto.concepts.size() << " concepts\n"
      << "classes: " << onto.count(ConceptKind::Class) << '\n'
      << "object properties: " << onto.count(ConceptKind::ObjectProperty) << '\n'
      << "datatype properties: " << onto.count(ConceptKind::DatatypeProperty) << '\n'
      << "annotation properties: " << onto.count(ConceptKind::AnnotationProperty) << '\n'
      << "triples: " << onto.triple_count << '\n'
      << "vocabulary: " << vocabulary(onto).size() << '\n';
  if (!s.out.empty()) write_output(s.out, to_graph(onto).text, out);
  return 0;
}

int cmd_index(const Settings& s, std::ostream& out) {
  require(s.out, "--out");
  Ontology onto = load_onto(s);
  auto selection = selection_of(s);
  auto embedder = embedder_of(s);
  if (s.basis != "full" && s.basis != "naive") throw UsageError("--basis must be full or naive");
  const Ontology source = s.basis == "naive" ? naive_reduce(onto, selection).ontology : onto;
  ConceptIndex index = build_concept_index(source, *embedder, s.basis, s.threads);
  save_index(index, s.out);
  out << "indexed " << index.entries.size() << " concepts (basis " << s.basis << ", embedder " << index.embedder
      << ") -> " << s.out << '\n';
  return 0;
}

Ontology selected(const Settings& s, const Ontology& onto, SelectionVariant variant, const std::string& question,
                  const Embedder& embedder, const Indexes& ix, const SelectionConfig& selection) {
  BenchmarkContext ctx;
  ctx.ontology = &onto;
  ctx.embedder = &embedder;
  ctx.full_index = ix.full ? &*ix.full : nullptr;
  ctx.naive_index = ix.naive ? &*ix.naive : nullptr;
  auto rules = s.rules.empty() ? default_enrichment_rules() : load_enrichment_rules(s.rules);
  return select_context(variant, question, ctx, selection, rules);
}

int cmd_reduce(const Settings& s, std::ostream& out) {
  Ontology onto = load_onto(s);
  auto variant = variant_of(s.variant);
  auto selection = selection_of(s);
  auto embedder = embedder_of(s);
  if (variant != SelectionVariant::OntA) require(s.question, "--question");
  bool full = variant == SelectionVariant::OntC || variant == SelectionVariant::OntD;
  auto ix = prepare_indexes(s, onto, *embedder, selection, full, variant == SelectionVariant::OntB, false, "reduce");
  Ontology result = selected(s, onto, variant, s.question, *embedder, ix, selection);
  write_output(s.out, to_graph(result).text, out);
  return 0;
}

int cmd_render(const Settings& s, std::ostream& out) {
  Ontology onto = load_onto(s);
  auto rendered = render(onto, format_of(s.format), !s.no_descriptions);
  write_output(s.out, rendered.text, out);
  return 0;
}

int cmd_ask(const Settings& s, std::ostream& out, std::ostream& err, std::istream& in) {
  Ontology onto = load_onto(s);
  auto variant = variant_of(s.variant);
  auto format = format_of(s.format);
  auto mode = mode_of(s.mode);
  auto selection = selection_of(s);
  auto embedder = embedder_of(s);
  bool full = variant == SelectionVariant::OntC || variant == SelectionVariant::OntD;
  auto ix = prepare_indexes(s, onto, *embedder, selection, full, variant == SelectionVariant::OntB, false, "ask");
  auto generic = optional_file(s.generic_example_file);
  auto domain = optional_file(s.domain_example_file);
  if (mode != PromptMode::Simple && !generic) throw UsageError("mode " + s.mode + " needs --generic-example-file");
  if (mode == PromptMode::Domain && !domain) throw UsageError("mode domain needs --domain-example-file");
  auto templates = s.templates.empty() ? PromptTemplates{} : PromptTemplates::load(s.templates);
  auto backend = backend_of(s, nullptr);
  const auto vocab = vocabulary(onto);

  auto answer = [&](const std::string& question) -> int {
    Ontology context = selected(s, onto, variant, question, *embedder, ix, selection);
    PromptBundle bundle =
        build_prompt(question, render(context, format, !s.no_descriptions), mode, generic, domain, templates);
    bundle.variant = variant;
    try {
      enforce_budget(bundle, s.prompt_budget);
    } catch (const BudgetExceeded& e) {
      err << "error: prompt exceeds the token budget: " << e.estimate() << " > " << e.budget() << " (overshoot "
          << e.overshoot() << " tokens)\n";
      return 1;
    }
    GenerationRecord record;
    try {
      record = generate(bundle, *backend);
    } catch (const Error& e) {
      err << "error: generation failed: " << e.what() << '\n';
      for (const auto& t : e.trace()) err << "  attempt: " << t << '\n';
      return 1;
    }
    if (!record.extracted_sparql) {
      err << "error: the completion contains no SPARQL query\n";
      return 1;
    }
    out << "SPARQL:\n" << *record.extracted_sparql << '\n';
    TermMatchResult match;
    try {
      match = hallucination_accuracy(extract_terms(*record.extracted_sparql, onto.prefixes), vocab);
    } catch (const ParseError& e) {
      err << "error: generated query does not parse: " << e.what() << '\n';
      return 1;
    }
    out << "Terms: " << (match.matches.size() + match.mismatches.size()) << " (matched " << match.matches.size()
        << ", invented " << match.mismatches.size() << ")\n";
    for (const auto& iri : match.matches) out << "  matched  " << iri.str() << '\n';
    for (const auto& iri : match.mismatches) out << "  invented " << iri.str() << '\n';
    out << "Acc: " << format_accuracy(match.accuracy) << (match.empty ? " (no terms)" : "") << '\n';
    return 0;
  };

  if (!s.interactive) {
    require(s.question, "--question (or --interactive)");
    return answer(s.question);
  }
  int status = 0;
  std::string line;
  while (true) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) break;
    status = std::max(status, answer(line));
  }
  out << '\n';
  return status;
}

std::vector<GridCell> grid_of(const Settings& s) {
  std::vector<std::string> variants = s.variants.empty() ? std::vector<std::string>{"OntA", "OntB", "OntC", "OntD"}
                                                         : s.variants;
  std::vector<std::string> formats =
      s.formats.empty() ? std::vector<std::string>{"graph", "table", "table-sorted"} : s.formats;
  std::vector<std::string> modes = s.modes.empty() ? std::vector<std::string>{"simple", "example", "domain"} : s.modes;
  std::vector<GridCell> grid;
  for (const auto& v : variants) {
    for (const auto& f : formats) {
      for (const auto& m : modes) grid.push_back({variant_of(v), format_of(f), mode_of(m)});
    }
  }
  if (grid.empty()) throw UsageError("benchmark grid is empty");
  return grid;
}

int cmd_bench(const Settings& s, std::ostream& out) {
  Ontology onto = load_onto(s);
  require(s.benchmark, "--benchmark");
  std::vector<BenchmarkItem> items;
  try {
    items = load_benchmark(s.benchmark);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  auto grid = grid_of(s);
  if (s.repetitions == 0) throw UsageError("--repetitions must be positive");

  BenchmarkConfig config;
  config.selection = selection_of(s);
  config.prompt_budget = s.prompt_budget;
  config.repetitions = s.repetitions;
  config.include_descriptions = !s.no_descriptions;
  config.generic_example = optional_file(s.generic_example_file);
  if (!s.templates.empty()) config.templates = PromptTemplates::load(s.templates);
  if (!s.rules.empty()) config.rules = load_enrichment_rules(s.rules);
  config.threads = s.threads;
  bool needs_example = std::any_of(grid.begin(), grid.end(), [](const GridCell& c) { return c.mode != PromptMode::Simple; });
  if (needs_example && !config.generic_example) throw UsageError("example and domain modes need --generic-example-file");

  auto embedder = embedder_of(s);
  bool full = std::any_of(grid.begin(), grid.end(), [](const GridCell& c) {
    return c.variant == SelectionVariant::OntC || c.variant == SelectionVariant::OntD;
  });
  bool naive = std::any_of(grid.begin(), grid.end(), [](const GridCell& c) { return c.variant == SelectionVariant::OntB; });
  auto ix = prepare_indexes(s, onto, *embedder, config.selection, full, naive, true, "bench");

  BenchmarkContext ctx;
  ctx.ontology = &onto;
  ctx.embedder = embedder.get();
  ctx.full_index = ix.full ? &*ix.full : nullptr;
  ctx.naive_index = ix.naive ? &*ix.naive : nullptr;

  if (!s.dump_prompts.empty()) {
    auto plans = plan_prompts(items, grid, ctx, config);
    std::ostringstream dump;
    for (const auto& p : plans) {
      json j;
      j["variant"] = to_string(p.cell.variant);
      j["format"] = to_string(p.cell.format);
      j["mode"] = to_string(p.cell.mode);
      j["item_id"] = p.item_id;
      j["token_estimate"] = p.token_estimate;
      j["budget_exceeded"] = p.budget_exceeded;
      if (p.bundle) {
        j["key"] = prompt_key(p.bundle->text);
        j["text"] = p.bundle->text;
      }
      if (!p.failure.empty()) j["failure"] = p.failure;
      dump << j.dump() << '\n';
    }
    write_output(s.dump_prompts, dump.str(), out);
    if (s.dump_prompts != "-") out << "wrote " << plans.size() << " planned prompts to " << s.dump_prompts << '\n';
    return 0;
  }

  auto backend = backend_of(s, &items);
  EvalReport report = run_benchmark(items, grid, ctx, config, *backend);

  fs::create_directories(s.out_dir);
  std::string table = accuracy_table_markdown(report);
  write_output((fs::path(s.out_dir) / "accuracy.md").string(), table, out);
  write_output((fs::path(s.out_dir) / "accuracy.csv").string(), accuracy_csv(report), out);
  write_output((fs::path(s.out_dir) / "runs.csv").string(), runs_csv(report), out);
  write_output((fs::path(s.out_dir) / "report.json").string(), report_json(report), out);
  out << table;
  std::size_t failures = 0;
  for (const auto& c : report.cells) failures += c.budget_failures + c.parse_failures + c.other_failures;
  out << report.cells.size() << " cells, " << report.runs.size() << " runs, " << failures << " failed runs; reports in "
      << s.out_dir << '\n';
  return 0;
}

int cmd_rate(const Settings& s, std::ostream& out) {
  require(s.runs, "--runs");
  require(s.out, "--out");
  auto raters = split_list(s.raters);
  if (raters.empty()) throw UsageError("--raters must name at least one rater");
  std::istringstream in(read_file(s.runs));
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> col;
  std::ostringstream sheet;
  sheet << "item_id,rater,correctness,completeness,variant,mode,format\n";
  std::size_t rows = 0, automatic = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line, line_no);
    if (col.empty()) {
      for (std::size_t i = 0; i < f.size(); ++i) col[f[i]] = i;
      for (const char* req : {"variant", "format", "mode", "item_id", "repetition", "outcome", "auto_correctness"}) {
        if (!col.count(req)) throw UsageError(s.runs + " lacks column '" + req + "'; expected a bench runs.csv");
      }
      continue;
    }
    if (f.size() != col.size()) throw UsageError(s.runs + ":" + std::to_string(line_no) + ": wrong field count");
    // Only the first repetition of each generated query is rated.
    if (f[col["repetition"]] != "1") continue;
    std::string correctness = f[col["auto_correctness"]];
    // A budget failure also fails the completeness scale at level 0.
    std::string completeness = f[col["outcome"]] == "budget-exceeded" ? "0" : "";
    for (const auto& r : raters) {
      sheet << detail::csv_field(f[col["item_id"]]) << ',' << detail::csv_field(r) << ',' << correctness << ','
            << completeness << ',' << f[col["variant"]] << ',' << f[col["mode"]] << ',' << f[col["format"]] << '\n';
      ++rows;
      if (!correctness.empty()) ++automatic;
    }
  }
  write_output(s.out, sheet.str(), out);
  out << "wrote " << rows << " rating rows (" << automatic << " with auto-assigned correctness) to " << s.out << '\n';
  return 0;
}

int cmd_report(const Settings& s, std::ostream& out) {
  require(s.ratings, "--ratings");
  std::vector<RatingRecord> records;
  try {
    records = load_ratings(s.ratings);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (records.empty()) throw UsageError(s.ratings + " holds no ratings");
  RatingDimension dim;
  if (s.dimension == "correctness") {
    dim = RatingDimension::Correctness;
  } else if (s.dimension == "completeness") {
    dim = RatingDimension::Completeness;
  } else {
    throw UsageError("--dimension must be correctness or completeness");
  }
  std::vector<std::string> modes = s.modes.empty() ? std::vector<std::string>{"example", "domain"} : s.modes;
  std::ostringstream text;
  text << ratings_table_markdown(records, dim, modes);
  auto overall = aggregate_ratings(records);
  text << "\nAll ratings: correctness mean " << format_fixed(overall.correctness.mean, 2) << ", completeness mean "
       << format_fixed(overall.completeness.mean, 2) << " (n=" << overall.correctness.n << ")\n";
  auto kappa = kappa_summary(records);
  text << "Fleiss kappa: correctness "
       << (kappa.correctness ? format_fixed(*kappa.correctness, 2) : std::string("n/a")) << ", completeness "
       << (kappa.completeness ? format_fixed(*kappa.completeness, 2) : std::string("n/a")) << '\n';
  if (!kappa.note.empty()) text << "  (" << kappa.note << ")\n";
  write_output(s.out, text.str(), out);
  if (!s.boxplot.empty()) write_output(s.boxplot, boxplot_csv(records), out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Context-aware natural-language-to-SPARQL prompting and hallucination evaluation", "ontorag"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  FlagSet fs_;
  auto common = [&](CLI::App* sub) {
    fs_.option(sub, "--config", &Settings::config, "JSON config file; flags override its values");
  };
  auto onto_opt = [&](CLI::App* sub) { fs_.option(sub, "--ontology", &Settings::ontology, "Turtle ontology file ('-' for stdin)"); };
  auto selection_opts = [&](CLI::App* sub) {
    fs_.option(sub, "--top-k", &Settings::top_k, "Concepts kept by context-based reduction (default 25)");
    fs_.option(sub, "--token-budget", &Settings::token_budget, "Token budget of the naive reduction (default 32000)");
  };
  auto embed_opts = [&](CLI::App* sub) {
    fs_.option(sub, "--embedder", &Settings::embedder, "lexical (default) or http");
    fs_.option(sub, "--embedding-endpoint", &Settings::embedding_endpoint, "Base URL of an embeddings API");
    fs_.option(sub, "--embedding-model", &Settings::embedding_model, "Embedding model name");
  };
  auto index_opts = [&](CLI::App* sub) {
    fs_.option(sub, "--index", &Settings::index, "Concept index over the full ontology (OntC, OntD)");
    fs_.option(sub, "--naive-index", &Settings::naive_index, "Concept index over the naive reduction (OntB)");
    fs_.option(sub, "--rules", &Settings::rules, "Enrichment rules JSON (OntD)");
  };
  auto backend_opts = [&](CLI::App* sub) {
    fs_.option(sub, "--backend", &Settings::backend, "mock (default), replay or http");
    fs_.option(sub, "--fixtures", &Settings::fixtures, "Replay fixtures JSONL");
    fs_.option(sub, "--mock-completion", &Settings::mock_completion, "Canned completion of the mock backend");
    fs_.option(sub, "--model", &Settings::model, "Chat model name (http)");
    fs_.option(sub, "--endpoint", &Settings::endpoint, "Base URL of an OpenAI-compatible API (http)");
    fs_.option(sub, "--api-key-env", &Settings::api_key_env, "Name of the environment variable holding the API key");
    fs_.option(sub, "--temperature", &Settings::temperature, "Sampling temperature (http)");
    fs_.option(sub, "--timeout-ms", &Settings::timeout_ms, "Request timeout in milliseconds (http)");
    fs_.option(sub, "--max-retries", &Settings::max_retries, "Retries after a failed request (http)");
    fs_.option(sub, "--max-in-flight", &Settings::max_in_flight, "Concurrent requests (http)");
  };
  auto prompt_opts = [&](CLI::App* sub) {
    fs_.option(sub, "--prompt-budget", &Settings::prompt_budget, "Token budget of the final prompt (default 32000)");
    fs_.option(sub, "--generic-example-file", &Settings::generic_example_file, "Query used by the example modes");
    fs_.option(sub, "--templates", &Settings::templates, "Prompt templates JSON");
    fs_.flag(sub, "--no-descriptions", &Settings::no_descriptions, "Omit class descriptions from table formats");
  };

  auto* ingest = app.add_subcommand("ingest", "Parse an ontology and print concept counts");
  common(ingest);
  onto_opt(ingest);
  fs_.option(ingest, "--out", &Settings::out, "Write the normalized ontology as Turtle");

  auto* index = app.add_subcommand("index", "Build a concept similarity index");
  common(index);
  onto_opt(index);
  fs_.option(index, "--out", &Settings::out, "Index file to write");
  fs_.option(index, "--basis", &Settings::basis, "full (OntC, OntD) or naive (OntB)");
  fs_.option(index, "--threads", &Settings::threads, "Parallel embedding calls");
  selection_opts(index);
  embed_opts(index);

  auto* reduce = app.add_subcommand("reduce", "Select a sub-ontology variant and write it as Turtle");
  common(reduce);
  onto_opt(reduce);
  fs_.option(reduce, "--variant", &Settings::variant, "OntA, OntB, OntC or OntD");
  fs_.option(reduce, "--question", &Settings::question, "Question driving context-based reduction");
  fs_.option(reduce, "--out", &Settings::out, "Output file (default stdout)");
  selection_opts(reduce);
  embed_opts(reduce);
  index_opts(reduce);

  auto* rend = app.add_subcommand("render", "Render an ontology as graph, table or table-sorted");
  common(rend);
  onto_opt(rend);
  fs_.option(rend, "--format", &Settings::format, "graph, table or table-sorted");
  fs_.option(rend, "--out", &Settings::out, "Output file (default stdout)");
  fs_.flag(rend, "--no-descriptions", &Settings::no_descriptions, "Omit class descriptions from table formats");

  auto* ask = app.add_subcommand("ask", "Generate SPARQL for a question and check it for invented terms");
  common(ask);
  onto_opt(ask);
  fs_.option(ask, "--question", &Settings::question, "Question");
  fs_.flag(ask, "--interactive", &Settings::interactive, "Read questions from standard input until an empty line");
  fs_.option(ask, "--variant", &Settings::variant, "OntA, OntB, OntC or OntD");
  fs_.option(ask, "--format", &Settings::format, "graph, table or table-sorted");
  fs_.option(ask, "--mode", &Settings::mode, "simple, example or domain");
  fs_.option(ask, "--domain-example-file", &Settings::domain_example_file, "Query used by the domain mode");
  selection_opts(ask);
  embed_opts(ask);
  index_opts(ask);
  backend_opts(ask);
  prompt_opts(ask);

  auto* bench = app.add_subcommand("bench", "Run the benchmark grid and write accuracy reports");
  common(bench);
  onto_opt(bench);
  fs_.option(bench, "--benchmark", &Settings::benchmark, "Benchmark JSONL");
  fs_.option(bench, "--variants", &Settings::variants, "Variants in the grid (default all)")->delimiter(',');
  fs_.option(bench, "--formats", &Settings::formats, "Formats in the grid (default all)")->delimiter(',');
  fs_.option(bench, "--modes", &Settings::modes, "Prompt modes in the grid (default all)")->delimiter(',');
  fs_.option(bench, "--repetitions", &Settings::repetitions, "Runs per prompt (default 5)");
  fs_.option(bench, "--threads", &Settings::threads, "Concurrent prompt groups");
  fs_.option(bench, "--out-dir", &Settings::out_dir, "Report directory (default ./report)");
  fs_.option(bench, "--dump-prompts", &Settings::dump_prompts, "Write planned prompts as JSONL and stop");
  fs_.flag(bench, "--mock-gold", &Settings::mock_gold, "Mock backend answers each question with its gold query");
  selection_opts(bench);
  embed_opts(bench);
  index_opts(bench);
  backend_opts(bench);
  prompt_opts(bench);

  auto* rate = app.add_subcommand("rate", "Create a rating sheet from bench runs with failure levels pre-filled");
  common(rate);
  fs_.option(rate, "--runs", &Settings::runs, "runs.csv written by bench");
  fs_.option(rate, "--raters", &Settings::raters, "Comma-separated rater names");
  fs_.option(rate, "--out", &Settings::out, "Rating sheet CSV to write");

  auto* rep = app.add_subcommand("report", "Aggregate expert ratings: mean/median/std and Fleiss' kappa");
  common(rep);
  fs_.option(rep, "--ratings", &Settings::ratings, "Ratings CSV");
  fs_.option(rep, "--dimension", &Settings::dimension, "correctness (default) or completeness");
  fs_.option(rep, "--modes", &Settings::modes, "Prompt modes as table column groups")->delimiter(',');
  fs_.option(rep, "--boxplot", &Settings::boxplot, "Write per-rating box-plot data CSV");
  fs_.option(rep, "--out", &Settings::out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Settings s = fs_.merged();
    if (ingest->parsed()) return cmd_ingest(s, out);
    if (index->parsed()) return cmd_index(s, out);
    if (reduce->parsed()) return cmd_reduce(s, out);
    if (rend->parsed()) return cmd_render(s, out);
    if (ask->parsed()) return cmd_ask(s, out, err, in);
    if (bench->parsed()) return cmd_bench(s, out);
    if (rate->parsed()) return cmd_rate(s, out);
    if (rep->parsed()) return cmd_report(s, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const MissingExample& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const AuthMissing& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& t : e.trace()) err << "  attempt: " << t << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ontorag
