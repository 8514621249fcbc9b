#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "ontorag/iri.h"

namespace ontorag {

enum class ConceptKind { Class, ObjectProperty, DatatypeProperty, AnnotationProperty };

std::string_view to_string(ConceptKind kind);

struct Concept {
  Iri iri;
  ConceptKind kind = ConceptKind::Class;
  std::optional<std::string> label;
  std::optional<std::string> comment;
  std::set<Iri> domains;
  std::set<Iri> ranges;
  std::set<Iri> super;  // rdfs:subClassOf for classes, rdfs:subPropertyOf for properties
  std::optional<Iri> inverse_of;

  bool is_property() const { return kind != ConceptKind::Class; }
  friend bool operator==(const Concept&, const Concept&) = default;
};

// Schema (TBox) view of an RDF document. Immutable once built.
struct Ontology {
  std::map<Iri, Concept> concepts;
  std::map<std::string, std::string> prefixes;
  std::size_t triple_count = 0;

  const Concept* find(const Iri& iri) const {
    auto it = concepts.find(iri);
    return it == concepts.end() ? nullptr : &it->second;
  }
  bool contains(const Iri& iri) const { return concepts.count(iri) != 0; }
  std::size_t count(ConceptKind kind) const;
};

// Number of RDF statements the concept's modeled fields stand for.
std::size_t statement_count(const Concept& concept_);

// Parses Turtle text into the schema model. Throws SyntaxError.
Ontology parse_ontology(std::string_view turtle_text);

// Reads and parses a .ttl file; "-" reads standard input.
Ontology load_ontology(const std::string& path);

// Declared concept IRIs plus every IRI referenced as domain, range,
// super concept or inverse.
std::set<Iri> vocabulary(const Ontology& ontology);

}  // namespace ontorag
