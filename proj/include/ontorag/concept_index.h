#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ontorag/embedder.h"
#include "ontorag/iri.h"
#include "ontorag/ontology.h"

namespace ontorag {

struct IndexEntry {
  Iri iri;
  std::string document;
  Vector vector;
};

// Per-concept documents and their embeddings. Entries are in ascending IRI
// order; all vectors share `dimension`.
struct ConceptIndex {
  std::vector<IndexEntry> entries;
  std::size_t dimension = 0;
  std::string embedder;  // Embedder::name() used to build it
  std::string basis;     // "full" or "naive": which ontology view was indexed

  bool empty() const { return entries.empty(); }
};

struct ScoredConcept {
  Iri iri;
  double score = 0.0;
};

// Local name, label and comment (each when present), space-joined.
std::string concept_document(const Concept& concept_);

// One entry per class, object property and datatype property. Embedding
// runs on up to `threads` worker threads. Throws EmbedderFailure.
ConceptIndex build_concept_index(const Ontology& ontology, const Embedder& embedder, std::string basis = "full",
                                 unsigned threads = 1);

// Cosine similarity. Throws DimensionMismatch or ZeroVector.
double similarity(const Vector& a, const Vector& b);

// All entries scored against `query`, best first; equal scores are ordered
// by ascending IRI. Pairs involving a zero vector score 0.
std::vector<ScoredConcept> rank(const ConceptIndex& index, const Vector& query);

// Line-delimited JSON: a header object, then one {iri, document, vector}
// object per entry.
void save_index(const ConceptIndex& index, const std::string& path);
ConceptIndex load_index(const std::string& path);

// Throws ConfigError if an indexed IRI is not in the ontology's vocabulary.
void check_index_against(const ConceptIndex& index, const Ontology& ontology);

}  // namespace ontorag
