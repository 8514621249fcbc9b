#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ontorag/concept_index.h"
#include "ontorag/embedder.h"
#include "ontorag/ontology.h"

namespace ontorag {

// OntA: naive reduction of the entire ontology.
// OntB: context-based reduction of OntA.
// OntC: context-based reduction of the entire ontology, full definitions.
// OntD: OntC plus ontology-based enrichment.
enum class SelectionVariant { OntA, OntB, OntC, OntD };

std::string_view to_string(SelectionVariant variant);  // "OntA" ...
std::optional<SelectionVariant> parse_variant(std::string_view name);

struct SelectionConfig {
  std::size_t top_k = 25;
  bool include_neighbors = true;
  std::set<Iri> keep_predicates = default_keep_predicates();
  std::size_t token_budget = 32000;

  static std::set<Iri> default_keep_predicates();
  void validate() const;  // throws ConfigError
};

struct NaiveReduction {
  Ontology ontology;
  bool truncated = false;
  std::vector<Iri> dropped;  // in drop order
  std::size_t token_estimate = 0;  // of the graph rendering of `ontology`
};

// Keeps only statements whose predicate is in keep_predicates, then drops
// concepts (unlabeled first, then lowest degree, then by IRI) until the
// graph rendering fits token_budget.
NaiveReduction naive_reduce(const Ontology& ontology, const SelectionConfig& config);

// Removes from one concept the fields whose predicate is not kept.
Concept strip_to_kept(const Concept& concept_, const std::set<Iri>& keep_predicates);

struct ContextSelection {
  Ontology ontology;
  std::vector<ScoredConcept> ranked;  // the top_k hits, before neighbor closure
};

// Top-k concepts by cosine similarity to the question, plus their one-hop
// neighbors when configured. With `rich` false only kept predicates survive.
// Throws EmptyIndex.
ContextSelection context_reduce(const Ontology& ontology, std::string_view question, const ConceptIndex& index,
                                const Embedder& embedder, const SelectionConfig& config, bool rich);

// One-hop closure: superclasses of classes, properties incident to classes,
// domain/range/inverse of properties, then domain and range of every
// property in the result. Only declared concepts are added.
std::set<Iri> neighbor_closure(const Ontology& ontology, const std::set<Iri>& seeds);

}  // namespace ontorag
