#include "ontorag/ontology.h"

#include <gtest/gtest.h>

#include <random>

#include "ontorag/errors.h"
#include "test_support.h"

using namespace ontorag;
using ontorag::testing::data_path;
using ontorag::testing::read_json;

namespace {

const char* kTwoConcepts = R"(@prefix ex: <http://ex.org/onto#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:Plant a owl:Class ; rdfs:label "Plant" .
ex:hasLine a owl:ObjectProperty ; rdfs:domain ex:Plant ; rdfs:range ex:Line .
)";

ConceptKind kind_of(const std::string& name) {
  if (name == "Class") return ConceptKind::Class;
  if (name == "ObjectProperty") return ConceptKind::ObjectProperty;
  if (name == "DatatypeProperty") return ConceptKind::DatatypeProperty;
  return ConceptKind::AnnotationProperty;
}

std::set<Iri> iri_set(const nlohmann::json& list) {
  std::set<Iri> out;
  for (const auto& s : list) out.insert(Iri(s.get<std::string>()));
  return out;
}

void expect_schema_matches_oracle(const std::string& ttl, const std::string& oracle_file) {
  Ontology onto = load_ontology(data_path(ttl));
  auto oracle = read_json(oracle_file);
  EXPECT_EQ(onto.triple_count, oracle["triples"].get<std::size_t>());
  EXPECT_EQ(onto.count(ConceptKind::Class), oracle["counts"]["Class"].get<std::size_t>());
  EXPECT_EQ(onto.count(ConceptKind::ObjectProperty), oracle["counts"]["ObjectProperty"].get<std::size_t>());
  EXPECT_EQ(onto.count(ConceptKind::DatatypeProperty), oracle["counts"]["DatatypeProperty"].get<std::size_t>());
  EXPECT_EQ(onto.count(ConceptKind::AnnotationProperty),
            oracle["counts"]["AnnotationProperty"].get<std::size_t>());
  ASSERT_EQ(onto.concepts.size(), oracle["concepts"].size());
  for (const auto& [iri, want] : oracle["concepts"].items()) {
    const Concept* c = onto.find(Iri(iri));
    ASSERT_NE(c, nullptr) << iri;
    EXPECT_EQ(c->kind, kind_of(want["kind"])) << iri;
    if (want["label"].is_null()) {
      EXPECT_FALSE(c->label) << iri;
    } else {
      EXPECT_EQ(c->label.value_or("<none>"), want["label"].get<std::string>()) << iri;
    }
    if (want["comment"].is_null()) {
      EXPECT_FALSE(c->comment) << iri;
    } else {
      EXPECT_EQ(c->comment.value_or("<none>"), want["comment"].get<std::string>()) << iri;
    }
    EXPECT_EQ(c->super, iri_set(want["super"])) << iri;
    EXPECT_EQ(c->domains, iri_set(want["domains"])) << iri;
    EXPECT_EQ(c->ranges, iri_set(want["ranges"])) << iri;
    if (want["inverse_of"].is_null()) {
      EXPECT_FALSE(c->inverse_of) << iri;
    } else {
      EXPECT_EQ(c->inverse_of.value_or(Iri()), Iri(want["inverse_of"].get<std::string>())) << iri;
    }
  }
  EXPECT_EQ(vocabulary(onto), iri_set(oracle["vocabulary"]));
}

}  // namespace

TEST(ParseOntology, EmptyDocument) {
  Ontology onto = parse_ontology("");
  EXPECT_TRUE(onto.concepts.empty());
  EXPECT_EQ(onto.triple_count, 0u);
  EXPECT_TRUE(vocabulary(onto).empty());
}

TEST(ParseOntology, TwoConceptExample) {
  Ontology onto = parse_ontology(kTwoConcepts);
  ASSERT_EQ(onto.concepts.size(), 2u);
  const Concept* has_line = onto.find(Iri("http://ex.org/onto#hasLine"));
  ASSERT_NE(has_line, nullptr);
  EXPECT_EQ(has_line->domains, std::set<Iri>{Iri("http://ex.org/onto#Plant")});
  EXPECT_FALSE(onto.contains(Iri("http://ex.org/onto#Line")));
  EXPECT_EQ(onto.find(Iri("http://ex.org/onto#Plant"))->label, "Plant");
  EXPECT_EQ(onto.prefixes.at("ex"), "http://ex.org/onto#");
}

TEST(Vocabulary, TwoConceptExampleIncludesReferencedIris) {
  EXPECT_EQ(vocabulary(parse_ontology(kTwoConcepts)),
            (std::set<Iri>{Iri("http://ex.org/onto#Plant"), Iri("http://ex.org/onto#hasLine"),
                           Iri("http://ex.org/onto#Line")}));
}

TEST(ParseOntology, SyntheticFixtureMatchesRdflib) {
  expect_schema_matches_oracle("data/mfg.ttl", "oracle/mfg_schema.json");
}

TEST(ParseOntology, CimmFixtureMatchesRdflib) {
  expect_schema_matches_oracle("data/cimm_like.ttl", "oracle/cimm_like_schema.json");
}

TEST(ParseOntology, PinnedFixtureCounts) {
  // Frozen from the rdflib run; a change means the fixture changed.
  EXPECT_EQ(load_ontology(data_path("data/mfg.ttl")).concepts.size(), 259u);
  EXPECT_EQ(vocabulary(load_ontology(data_path("data/mfg.ttl"))).size(), 265u);
  EXPECT_EQ(load_ontology(data_path("data/cimm_like.ttl")).concepts.size(), 12u);
  EXPECT_EQ(vocabulary(load_ontology(data_path("data/cimm_like.ttl"))).size(), 14u);
}

TEST(ParseOntology, PrefersEnglishOrUntaggedLabels) {
  Ontology onto = parse_ontology(R"(@prefix ex: <http://ex.org/#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:A a owl:Class ; rdfs:label "Werk"@de , "Plant"@en , "Fabrik" .
ex:B a owl:Class ; rdfs:label "Linie"@de .
ex:C a owl:Class ; rdfs:label "first" , "second" .
)");
  EXPECT_EQ(onto.find(Iri("http://ex.org/#A"))->label, "Plant");
  EXPECT_EQ(onto.find(Iri("http://ex.org/#B"))->label, "Linie");
  EXPECT_EQ(onto.find(Iri("http://ex.org/#C"))->label, "first");
}

TEST(ParseOntology, ClassesIgnoreDomainRangeAndInverse) {
  Ontology onto = parse_ontology(R"(@prefix ex: <http://ex.org/#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:A a owl:Class ; rdfs:domain ex:X ; rdfs:range ex:Y ; owl:inverseOf ex:Z ;
  rdfs:subClassOf [ a owl:Restriction ; owl:onProperty ex:p ] , ex:Top .
ex:r a rdfs:Class .
)");
  const Concept* a = onto.find(Iri("http://ex.org/#A"));
  ASSERT_NE(a, nullptr);
  EXPECT_TRUE(a->domains.empty());
  EXPECT_TRUE(a->ranges.empty());
  EXPECT_FALSE(a->inverse_of);
  EXPECT_EQ(a->super, std::set<Iri>{Iri("http://ex.org/#Top")});
  EXPECT_EQ(onto.find(Iri("http://ex.org/#r"))->kind, ConceptKind::Class);
}

TEST(ParseOntology, DatatypeRangesAreDatatypes) {
  Ontology onto = load_ontology(data_path("data/mfg.ttl"));
  for (const auto& [iri, c] : onto.concepts) {
    if (c.kind != ConceptKind::DatatypeProperty) continue;
    for (const auto& r : c.ranges) {
      EXPECT_TRUE(r.str().rfind(vocab::kXsd, 0) == 0 || r == vocab::rdfs("Literal")) << iri.str();
    }
  }
}

TEST(ParseOntology, DeclaredReferencesAreConcepts) {
  for (const char* file : {"data/mfg.ttl", "data/cimm_like.ttl"}) {
    Ontology onto = load_ontology(data_path(file));
    std::set<Iri> subjects;
    for (const auto& [iri, c] : onto.concepts) subjects.insert(iri);
    for (const auto& [iri, c] : onto.concepts) {
      for (const auto* set : {&c.domains, &c.ranges, &c.super}) {
        for (const auto& ref : *set) {
          if (ref.str().rfind("http://example.org/mfg#", 0) == 0) EXPECT_TRUE(onto.contains(ref)) << ref.str();
        }
      }
    }
  }
}

TEST(ParseOntology, MalformedInputRaisesSyntaxError) {
  EXPECT_THROW(parse_ontology("@prefix ex: <http://ex.org/> .\nex:A a"), SyntaxError);
}

TEST(LoadOntology, MissingFileIsConfigError) {
  EXPECT_THROW(load_ontology("/nonexistent/file.ttl"), ConfigError);
}

TEST(Vocabulary, MonotoneUnderAddedDeclarations) {
  std::mt19937 rng(11);
  const std::string head =
      "@prefix ex: <http://ex.org/#> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
      "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n";
  for (int trial = 0; trial < 50; ++trial) {
    std::string body;
    std::set<Iri> previous;
    for (int step = 0; step < 10; ++step) {
      int a = rng() % 8, b = rng() % 8;
      if (rng() % 2) {
        body += "ex:C" + std::to_string(a) + " a owl:Class ; rdfs:subClassOf ex:C" + std::to_string(b) + " .\n";
      } else {
        body += "ex:p" + std::to_string(a) + " a owl:ObjectProperty ; rdfs:domain ex:C" + std::to_string(b) + " .\n";
      }
      auto current = vocabulary(parse_ontology(head + body));
      for (const auto& iri : previous) EXPECT_TRUE(current.count(iri)) << iri.str();
      previous = std::move(current);
    }
  }
}

TEST(StatementCount, CountsModeledFields) {
  Concept c;
  c.iri = Iri("http://x/#p");
  c.kind = ConceptKind::ObjectProperty;
  EXPECT_EQ(statement_count(c), 1u);
  c.label = "p";
  c.comment = "c";
  c.domains = {Iri("http://x/#A"), Iri("http://x/#B")};
  c.ranges = {Iri("http://x/#C")};
  c.inverse_of = Iri("http://x/#q");
  EXPECT_EQ(statement_count(c), 7u);
}
