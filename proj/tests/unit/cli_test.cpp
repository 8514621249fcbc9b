#include "ontorag/cli.h"

#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "ontorag/concept_index.h"
#include "ontorag/llm_gateway.h"
#include "test_support.h"

using ontorag::testing::data_path;
using ontorag::testing::read_file;
using ontorag::testing::TempDir;
using ontorag::testing::write_file;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "ontorag");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  std::istringstream in(input);
  Result r;
  r.code = ontorag::run_cli(static_cast<int>(argv.size()), argv.data(), out, err, in);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string kQuestion = "Which lines belong to which plant?";
const std::string kGoldLines =
    "PREFIX mfg: <http://example.org/mfg#>\nSELECT ?l ?p WHERE { ?l a mfg:Line ; mfg:belongsToPlant ?p . ?p a mfg:Plant }";

}  // namespace

TEST(Cli, IngestPrintsCounts) {
  auto r = cli({"ingest", "--ontology", data_path("data/mfg.ttl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "259 concepts\nclasses: 159\nobject properties: 70\ndatatype properties: 29\nannotation properties: 1\n"
            "triples: 1021\nvocabulary: 265\n");
}

TEST(Cli, IngestEmptyAndMalformed) {
  TempDir dir("cli_ingest");
  write_file(dir.file("empty.ttl"), "");
  auto empty = cli({"ingest", "--ontology", dir.file("empty.ttl")});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out.rfind("0 concepts\n", 0), 0u);
  write_file(dir.file("bad.ttl"), "@prefix ex: <http://e/> .\nex:a a ex:B .\nex:c ex:d \"unterminated .\n");
  auto bad = cli({"ingest", "--ontology", dir.file("bad.ttl")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 3"), std::string::npos) << bad.err;
  auto missing = cli({"ingest", "--ontology", dir.file("absent.ttl")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("not found"), std::string::npos);
}

TEST(Cli, AskWithGoldQueryScoresOne) {
  auto r = cli({"ask", "--ontology", data_path("data/mfg.ttl"), "--question", kQuestion, "--mock-completion",
                "```sparql\n" + kGoldLines + "\n```"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Acc: 1.0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("invented 0"), std::string::npos);
}

TEST(Cli, AskReportsInventedTerm) {
  auto r = cli({"ask", "--ontology", data_path("data/mfg.ttl"), "--question", kQuestion, "--mock-completion",
                "PREFIX mfg: <http://example.org/mfg#>\nSELECT ?l WHERE { ?l a mfg:Line ; mfg:belongsToPlant ?p . "
                "?p mfg:inventedProp ?x }"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Acc: 0.75\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("invented http://example.org/mfg#inventedProp"), std::string::npos);
}

TEST(Cli, AskFailures) {
  const std::string onto = data_path("data/mfg.ttl");
  auto none = cli({"ask", "--ontology", onto, "--question", kQuestion, "--mock-completion", "No idea."});
  EXPECT_EQ(none.code, 1);
  EXPECT_NE(none.err.find("no SPARQL"), std::string::npos);
  auto bad = cli({"ask", "--ontology", onto, "--question", kQuestion, "--mock-completion", "SELECT ?x WHERE { ?x }"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("does not parse"), std::string::npos);
  auto budget = cli({"ask", "--ontology", onto, "--question", kQuestion, "--prompt-budget", "10"});
  EXPECT_EQ(budget.code, 1);
  EXPECT_NE(budget.err.find("overshoot"), std::string::npos);
  auto example = cli({"ask", "--ontology", onto, "--question", kQuestion, "--mode", "example"});
  EXPECT_EQ(example.code, 2);
  EXPECT_NE(example.err.find("--generic-example-file"), std::string::npos);
}

TEST(Cli, AskWithoutIndexNamesTheIndexCommand) {
  auto r = cli({"ask", "--ontology", data_path("data/mfg.ttl"), "--question", kQuestion, "--variant", "OntC"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ontorag index"), std::string::npos) << r.err;
}

TEST(Cli, IndexThenAskAndReduce) {
  TempDir dir("cli_index");
  const std::string onto = data_path("data/mfg.ttl");
  auto ix = cli({"index", "--ontology", onto, "--out", dir.file("full.idx")});
  ASSERT_EQ(ix.code, 0) << ix.err;
  EXPECT_NE(ix.out.find("indexed 258 concepts"), std::string::npos);
  auto ask = cli({"ask", "--ontology", onto, "--question", kQuestion, "--variant", "OntD", "--format", "table",
                  "--index", dir.file("full.idx"), "--mock-completion", kGoldLines});
  ASSERT_EQ(ask.code, 0) << ask.err;
  EXPECT_NE(ask.out.find("Acc: 1.0"), std::string::npos);
  auto reduce = cli({"reduce", "--ontology", onto, "--variant", "OntC", "--question", kQuestion, "--index",
                     dir.file("full.idx"), "--out", dir.file("ontc.ttl")});
  ASSERT_EQ(reduce.code, 0) << reduce.err;
  auto reduced = cli({"ingest", "--ontology", dir.file("ontc.ttl")});
  ASSERT_EQ(reduced.code, 0);
  EXPECT_GT(std::stoul(reduced.out), 0u);
  auto wrong_basis = cli({"reduce", "--ontology", onto, "--variant", "OntB", "--question", kQuestion,
                          "--naive-index", dir.file("full.idx")});
  EXPECT_EQ(wrong_basis.code, 2);
  EXPECT_NE(wrong_basis.err.find("basis"), std::string::npos);
}

TEST(Cli, InteractiveAsk) {
  auto r = cli({"ask", "--ontology", data_path("data/mfg.ttl"), "--interactive", "--mock-completion", kGoldLines},
               kQuestion + "\n" + kQuestion + "\n\n");
  EXPECT_EQ(r.code, 0) << r.err;
  std::size_t hits = 0;
  for (std::size_t p = r.out.find("Acc: 1.0"); p != std::string::npos; p = r.out.find("Acc: 1.0", p + 1)) ++hits;
  EXPECT_EQ(hits, 2u);
}

TEST(Cli, RenderFormats) {
  auto r = cli({"render", "--ontology", data_path("data/cimm_like.ttl"), "--format", "table"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(data_path("golden/cimm_like.table.txt")));
  auto bad = cli({"render", "--ontology", data_path("data/cimm_like.ttl"), "--format", "xml"});
  EXPECT_EQ(bad.code, 2);
}

TEST(Cli, BenchMockGoldThenRateAndReport) {
  TempDir dir("cli_bench");
  auto r = cli({"bench", "--ontology", data_path("data/mfg.ttl"), "--benchmark", data_path("data/benchmark.jsonl"),
                "--generic-example-file", data_path("data/generic_example.rq"), "--mock-gold", "--repetitions", "1",
                "--variants", "OntA,OntC", "--formats", "graph", "--out-dir", dir.file("rep")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| P_simple(graph) | 1.00 | 1.00 |"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("6 cells"), std::string::npos);
  auto csv = read_file(dir.file("rep/accuracy.csv"));
  EXPECT_NE(csv.find("OntC,graph,domain,1,1"), std::string::npos) << csv;

  auto rate = cli({"rate", "--runs", dir.file("rep/runs.csv"), "--raters", "a,b", "--out", dir.file("sheet.csv")});
  ASSERT_EQ(rate.code, 0) << rate.err;
  EXPECT_NE(rate.out.find("wrote 144 rating rows"), std::string::npos) << rate.out;

  auto report = cli({"report", "--ratings", data_path("data/expert_ratings.csv")});
  ASSERT_EQ(report.code, 0) << report.err;
  EXPECT_NE(report.out.find("| Ont_A | 2.54 | 2.0 | 0.71 | 2.70 | 2.0 | 0.87 |"), std::string::npos) << report.out;
  EXPECT_NE(report.out.find("Fleiss kappa: correctness "), std::string::npos);
}

TEST(Cli, BenchDumpPromptsAndReplay) {
  TempDir dir("cli_replay");
  std::vector<std::string> base = {"bench", "--ontology", data_path("data/mfg.ttl"), "--benchmark",
                                   data_path("data/benchmark.jsonl"), "--variants", "OntB", "--formats", "table",
                                   "--modes", "simple", "--repetitions", "2", "--out-dir", dir.file("rep")};
  auto dump_args = base;
  dump_args.insert(dump_args.end(), {"--dump-prompts", dir.file("plans.jsonl")});
  auto dump = cli(dump_args);
  ASSERT_EQ(dump.code, 0) << dump.err;
  std::istringstream plans(read_file(dir.file("plans.jsonl")));
  std::string line, fixtures;
  std::size_t n = 0;
  while (std::getline(plans, line)) {
    auto j = nlohmann::json::parse(line);
    fixtures += nlohmann::json{{"key", j["key"]}, {"completions", {"SELECT * { ?s ?p ?o }"}}}.dump() + "\n";
    ++n;
  }
  EXPECT_EQ(n, 12u);
  write_file(dir.file("fixtures.jsonl"), fixtures);
  auto replay_args = base;
  replay_args.insert(replay_args.end(), {"--backend", "replay", "--fixtures", dir.file("fixtures.jsonl")});
  auto r = cli(replay_args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| P_simple(table) | 1.00 |"), std::string::npos) << r.out;
  replay_args[6] = "OntC";
  auto miss = cli(replay_args);
  EXPECT_EQ(miss.code, 1);
  EXPECT_NE(miss.err.find("replay"), std::string::npos) << miss.err;
}

TEST(Cli, HelpAndUsageErrors) {
  auto help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("bench"), std::string::npos);
  EXPECT_NE(cli({"ingest", "--no-such-flag"}).code, 0);
  EXPECT_NE(cli({}).code, 0);
  EXPECT_EQ(cli({"ingest"}).code, 2);
  EXPECT_EQ(cli({"bench", "--ontology", data_path("data/mfg.ttl"), "--benchmark", data_path("data/benchmark.jsonl"),
                 "--variants", "OntX"})
                .code,
            2);
}

TEST(Cli, HttpBackendNeedsKeyFromEnvironment) {
  ::unsetenv("ONTORAG_CLI_TEST_KEY");
  std::size_t before = ontorag::network_request_count();
  auto r = cli({"ask", "--ontology", data_path("data/mfg.ttl"), "--question", kQuestion, "--backend", "http",
                "--endpoint", "http://127.0.0.1:9/v1", "--api-key-env", "ONTORAG_CLI_TEST_KEY"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ONTORAG_CLI_TEST_KEY"), std::string::npos) << r.err;
  EXPECT_EQ(ontorag::network_request_count(), before);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir("cli_config");
  write_file(dir.file("c.json"), "{\"ontology\": \"" + data_path("data/cimm_like.ttl") + "\", \"format\": \"graph\"}");
  auto r = cli({"render", "--config", dir.file("c.json"), "--format", "table-sorted"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(data_path("golden/cimm_like.table_sorted.txt")));
  write_file(dir.file("bad.json"), "{\"colour\": 1}");
  auto bad = cli({"render", "--config", dir.file("bad.json")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("colour"), std::string::npos);
}
