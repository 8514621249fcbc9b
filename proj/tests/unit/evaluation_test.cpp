#include "ontorag/evaluation.h"

#include <gtest/gtest.h>

#include <random>

#include "ontorag/errors.h"
#include "test_support.h"

using namespace ontorag;
using ontorag::testing::data_path;
using ontorag::testing::read_file;

namespace {

const std::string kMfg = "http://example.org/mfg#";

Iri mfg(const std::string& l) { return Iri(kMfg + l); }

struct Fixture {
  Ontology ontology = load_ontology(data_path("data/mfg.ttl"));
  std::vector<BenchmarkItem> items = load_benchmark(data_path("data/benchmark.jsonl"));
  LexicalEmbedder embedder;
  ConceptIndex full = build_concept_index(ontology, embedder, "full");
  ConceptIndex naive = build_concept_index(naive_reduce(ontology, SelectionConfig{}).ontology, embedder, "naive");

  BenchmarkContext context() const { return {&ontology, &embedder, &full, &naive}; }

  BenchmarkConfig config(unsigned reps) const {
    BenchmarkConfig c;
    c.repetitions = reps;
    c.generic_example = read_file(data_path("data/generic_example.rq"));
    return c;
  }

  std::unique_ptr<MockBackend> gold_mock() const {
    std::map<std::string, std::string> gold;
    for (const auto& it : items) gold[it.question] = it.gold_sparql;
    return std::make_unique<MockBackend>([gold](const PromptBundle& b) { return gold.at(b.question); });
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Accuracy, WorkedExamples) {
  std::set<Iri> vocab = {mfg("Line"), mfg("partOf"), mfg("PlantX")};
  std::set<Iri> terms = {vocab::rdf("type"), mfg("Line"), mfg("partOf"), mfg("PlantX")};
  EXPECT_EQ(hallucination_accuracy(terms, vocab).accuracy, 1.0);
  terms.erase(mfg("PlantX"));
  terms.insert(mfg("inventedProp"));
  auto r = hallucination_accuracy(terms, vocab);
  EXPECT_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.mismatches, std::set<Iri>{mfg("inventedProp")});
}

TEST(Accuracy, EmptyTermsFlagged) {
  auto r = hallucination_accuracy({}, std::set<Iri>{});
  EXPECT_TRUE(r.empty);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Accuracy, StandardVocabularyOption) {
  std::set<Iri> terms = {vocab::rdfs("label")};
  EXPECT_EQ(hallucination_accuracy(terms, std::set<Iri>{}).accuracy, 1.0);
  EXPECT_EQ(hallucination_accuracy(terms, std::set<Iri>{}, {false}).accuracy, 0.0);
}

TEST(Accuracy, RandomizedAgainstSetOracle) {
  std::mt19937 rng(2024);
  std::vector<Iri> universe;
  for (int i = 0; i < 40; ++i) universe.push_back(mfg("t" + std::to_string(i)));
  for (int trial = 0; trial < 200; ++trial) {
    std::set<Iri> vocab, terms;
    for (const auto& iri : universe) {
      if (rng() % 2) vocab.insert(iri);
      if (rng() % 4 == 0) terms.insert(iri);
    }
    if (terms.empty()) terms.insert(universe[rng() % universe.size()]);
    std::size_t m = 0, mm = 0;
    for (const auto& t : terms) (vocab.find(t) != vocab.end() ? m : mm)++;
    auto r = hallucination_accuracy(terms, vocab, {false});
    EXPECT_EQ(r.accuracy, static_cast<double>(m) / static_cast<double>(m + mm));
    EXPECT_EQ(r.matches.size(), m);
    EXPECT_EQ(r.mismatches.size(), mm);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    EXPECT_EQ(r.accuracy == 1.0, r.mismatches.empty());
    // Adding an unknown term never raises accuracy.
    std::set<Iri> more = terms;
    more.insert(mfg("unknown" + std::to_string(trial)));
    EXPECT_LE(hallucination_accuracy(more, vocab, {false}).accuracy, r.accuracy);
    // Adding a known term never lowers it.
    Iri known = mfg("known" + std::to_string(trial));
    std::set<Iri> vocab2 = vocab;
    vocab2.insert(known);
    more = terms;
    more.insert(known);
    EXPECT_GE(hallucination_accuracy(more, vocab2, {false}).accuracy, r.accuracy);
  }
}

TEST(Accuracy, GoldQueriesScoreOne) {
  const auto& f = fixture();
  for (const auto& item : f.items) {
    auto r = hallucination_accuracy(extract_terms(item.gold_sparql, f.ontology.prefixes), f.ontology);
    EXPECT_EQ(r.accuracy, 1.0) << item.id;
    EXPECT_FALSE(r.empty) << item.id;
  }
}

TEST(ExtractTerms, StandardPrefixesAlwaysAvailable) {
  EXPECT_EQ(extract_terms("SELECT * { ?x rdf:type owl:Class }"), (std::set<Iri>{vocab::rdf("type"), vocab::owl("Class")}));
  EXPECT_THROW(extract_terms("SELECT * { ?x nope:p ?y }"), ParseError);
}

TEST(Benchmark, ParsesFixture) {
  const auto& items = fixture().items;
  ASSERT_GE(items.size(), 10u);
  std::set<std::string> personas;
  for (const auto& it : items) personas.insert(it.persona);
  EXPECT_EQ(personas.size(), 5u);
  EXPECT_TRUE(items.front().domain_example);
}

TEST(Benchmark, Errors) {
  const std::string ok = R"({"id":"a","persona":"p","question":"q?","gold_sparql":"ASK {}","ontology_tag":"t"})";
  EXPECT_EQ(parse_benchmark(ok + "\n\n").size(), 1u);
  EXPECT_THROW(parse_benchmark(ok + "\n" + ok), ConfigError);
  EXPECT_THROW(parse_benchmark(R"({"id":"a","persona":"p","question":"","gold_sparql":"","ontology_tag":"t"})"),
               ConfigError);
  EXPECT_THROW(parse_benchmark(R"({"id":"a"})"), ConfigError);
  EXPECT_THROW(parse_benchmark("[1,2]"), ConfigError);
  try {
    parse_benchmark(ok + "\n{broken");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Grid, FullGridIs36CellsInOrder) {
  auto g = full_grid();
  ASSERT_EQ(g.size(), 36u);
  EXPECT_EQ(to_string(g.front()), "OntA/graph/simple");
  EXPECT_EQ(to_string(g[1]), "OntA/graph/example");
  EXPECT_EQ(to_string(g.back()), "OntD/table-sorted/domain");
  EXPECT_EQ(std::set<GridCell>(g.begin(), g.end()).size(), 36u);
}

TEST(RunBenchmark, GoldMockScoresOneEverywhere) {
  const auto& f = fixture();
  auto mock = f.gold_mock();
  auto config = f.config(2);
  config.threads = 4;
  auto report = run_benchmark(f.items, full_grid(), f.context(), config, *mock);
  ASSERT_EQ(report.cells.size(), 36u);
  EXPECT_EQ(report.runs.size(), 36u * f.items.size() * 2u);
  for (const auto& c : report.cells) {
    ASSERT_TRUE(c.mean) << to_string(c.cell);
    EXPECT_EQ(*c.mean, 1.0) << to_string(c.cell);
    EXPECT_EQ(c.budget_failures + c.parse_failures + c.other_failures, 0u);
  }
}

TEST(RunBenchmark, CellMeanIsMacroAverageOverItems) {
  const auto& f = fixture();
  std::vector<BenchmarkItem> items(f.items.begin(), f.items.begin() + 3);
  // Item 2 invents one of four terms: {1.0, 0.75, 1.0}.
  MockBackend mock([&](const PromptBundle& b) -> std::string {
    if (b.question == items[1].question) {
      return "PREFIX mfg: <http://example.org/mfg#>\nSELECT * { ?l a mfg:Line ; mfg:belongsToPlant ?p . ?p mfg:madeUp ?x }";
    }
    for (const auto& it : items) {
      if (it.question == b.question) return it.gold_sparql;
    }
    return "";
  });
  auto report = run_benchmark(items, {{SelectionVariant::OntC, Format::Table, PromptMode::Simple}}, f.context(),
                              f.config(1), mock);
  ASSERT_EQ(report.cells.size(), 1u);
  EXPECT_NEAR(*report.cells[0].mean, (1.0 + 0.75 + 1.0) / 3.0, 1e-9);
  EXPECT_EQ(report.runs[1].match.mismatches, std::set<Iri>{mfg("madeUp")});
}

TEST(RunBenchmark, BudgetFailuresRenderAsDash) {
  const auto& f = fixture();
  auto config = f.config(2);
  config.prompt_budget = 1;
  auto mock = f.gold_mock();
  auto report = run_benchmark(f.items, {{SelectionVariant::OntA, Format::Graph, PromptMode::Simple}}, f.context(),
                              config, *mock);
  const auto& c = report.cells[0];
  EXPECT_TRUE(c.budget_exceeded());
  EXPECT_FALSE(c.mean);
  for (const auto& r : report.runs) {
    EXPECT_EQ(r.outcome, RunOutcome::BudgetExceeded);
    EXPECT_EQ(r.auto_correctness, 0);
  }
}

TEST(RunBenchmark, FailureKindsRecorded) {
  const auto& f = fixture();
  std::vector<BenchmarkItem> items(f.items.begin(), f.items.begin() + 2);
  MockBackend mock([&](const PromptBundle& b) -> std::string {
    return b.question == items[0].question ? "I have no idea." : "SELECT ?x WHERE { ?x ?p }";
  });
  auto report = run_benchmark(items, {{SelectionVariant::OntB, Format::Graph, PromptMode::Simple}}, f.context(),
                              f.config(1), mock);
  EXPECT_EQ(report.runs[0].outcome, RunOutcome::NoQuery);
  EXPECT_EQ(report.runs[1].outcome, RunOutcome::ParseFailure);
  EXPECT_EQ(report.runs[1].auto_correctness, 1);
  EXPECT_EQ(report.cells[0].parse_failures, 2u);
  EXPECT_FALSE(report.cells[0].mean);
  EXPECT_FALSE(report.cells[0].budget_exceeded());
}

TEST(RunBenchmark, MissingExampleIsGenerationError) {
  const auto& f = fixture();
  auto config = f.config(1);
  config.generic_example.reset();
  auto mock = f.gold_mock();
  auto report = run_benchmark(f.items, {{SelectionVariant::OntC, Format::Graph, PromptMode::Example}}, f.context(),
                              config, *mock);
  EXPECT_EQ(report.cells[0].other_failures, f.items.size());
}

TEST(RunBenchmark, ReplayMissPropagates) {
  const auto& f = fixture();
  ReplayBackend replay(std::map<std::string, std::vector<std::string>>{{"unused", {"ASK {}"}}});
  EXPECT_THROW(run_benchmark(f.items, {{SelectionVariant::OntC, Format::Graph, PromptMode::Simple}}, f.context(),
                             f.config(1), replay),
               ReplayMiss);
}

TEST(RunBenchmark, ReplayDeterministicAcrossThreadCounts) {
  const auto& f = fixture();
  std::vector<GridCell> grid = {{SelectionVariant::OntB, Format::Table, PromptMode::Simple},
                                {SelectionVariant::OntC, Format::Graph, PromptMode::Domain}};
  auto config = f.config(3);
  std::map<std::string, std::vector<std::string>> fixtures;
  for (const auto& p : plan_prompts(f.items, grid, f.context(), config)) {
    const auto& item = *std::find_if(f.items.begin(), f.items.end(), [&](const auto& i) { return i.id == p.item_id; });
    fixtures[prompt_key(p.bundle->text)] = {item.gold_sparql, "no query", "SELECT * { ?x <http://x/y> ?z }"};
  }
  auto run = [&](unsigned threads) {
    ReplayBackend replay(fixtures);
    auto c = config;
    c.threads = threads;
    return run_benchmark(f.items, grid, f.context(), c, replay);
  };
  auto a = run(1), b = run(6);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].outcome, b.runs[i].outcome);
    EXPECT_EQ(a.runs[i].accuracy, b.runs[i].accuracy);
  }
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    EXPECT_EQ(a.cells[c].repetition_means, b.cells[c].repetition_means);
    EXPECT_EQ(a.cells[c].repetition_means[0], 1.0);
    EXPECT_FALSE(a.cells[c].repetition_means[1]);
    EXPECT_EQ(a.cells[c].repetition_means[2], 0.0);
    EXPECT_EQ(a.cells[c].mean, 0.5);
  }
}

TEST(PlanPrompts, DoesNotCallBackendAndCarriesKeys) {
  const auto& f = fixture();
  auto plans = plan_prompts(f.items, full_grid(), f.context(), f.config(1));
  EXPECT_EQ(plans.size(), 36u * f.items.size());
  for (const auto& p : plans) {
    ASSERT_TRUE(p.bundle);
    EXPECT_EQ(p.token_estimate, p.bundle->token_estimate);
    EXPECT_EQ(p.bundle->variant, p.cell.variant);
  }
}

TEST(SelectContext, VariantsNest) {
  const auto& f = fixture();
  const std::string q = f.items.front().question;
  SelectionConfig sc;
  auto a = select_context(SelectionVariant::OntA, q, f.context(), sc, default_enrichment_rules());
  auto b = select_context(SelectionVariant::OntB, q, f.context(), sc, default_enrichment_rules());
  auto c = select_context(SelectionVariant::OntC, q, f.context(), sc, default_enrichment_rules());
  auto d = select_context(SelectionVariant::OntD, q, f.context(), sc, default_enrichment_rules());
  EXPECT_LE(b.concepts.size(), a.concepts.size());
  for (const auto& [iri, concept_] : b.concepts) EXPECT_TRUE(a.concepts.count(iri)) << iri.str();
  ASSERT_EQ(c.concepts.size(), d.concepts.size());
  for (const auto& [iri, concept_] : c.concepts) EXPECT_TRUE(d.concepts.count(iri)) << iri.str();
  BenchmarkContext no_index = f.context();
  no_index.full_index = nullptr;
  EXPECT_THROW(select_context(SelectionVariant::OntC, q, no_index, sc, default_enrichment_rules()), ConfigError);
}
