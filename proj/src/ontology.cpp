#include "ontorag/ontology.h"

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "ontorag/errors.h"
#include "ontorag/turtle.h"

namespace ontorag {

std::string_view to_string(ConceptKind kind) {
  switch (kind) {
    case ConceptKind::Class: return "Class";
    case ConceptKind::ObjectProperty: return "ObjectProperty";
    case ConceptKind::DatatypeProperty: return "DatatypeProperty";
    case ConceptKind::AnnotationProperty: return "AnnotationProperty";
  }
  return "?";
}

std::size_t Ontology::count(ConceptKind kind) const {
  std::size_t n = 0;
  for (const auto& [iri, concept_] : concepts) n += concept_.kind == kind;
  return n;
}

namespace {

std::optional<ConceptKind> declared_kind(const std::string& type_iri) {
  static const std::map<std::string, ConceptKind> kTypes = {
      {vocab::owl("Class").str(), ConceptKind::Class},
      {vocab::rdfs("Class").str(), ConceptKind::Class},
      {vocab::owl("ObjectProperty").str(), ConceptKind::ObjectProperty},
      {vocab::owl("DatatypeProperty").str(), ConceptKind::DatatypeProperty},
      {vocab::owl("AnnotationProperty").str(), ConceptKind::AnnotationProperty},
  };
  auto it = kTypes.find(type_iri);
  if (it == kTypes.end()) return std::nullopt;
  return it->second;
}

bool preferred_language(const std::string& lang) {
  return lang.empty() || lang == "en" || lang.rfind("en-", 0) == 0;
}

// First untagged or English literal wins; any other tag is used only when
// nothing better exists.
struct AnnotationPick {
  std::optional<std::string> value;
  bool preferred = false;

  void offer(const turtle::Term& literal) {
    bool pref = preferred_language(literal.language);
    if (!value || (pref && !preferred)) {
      value = literal.value;
      preferred = pref;
    }
  }
};

}  // namespace

Ontology parse_ontology(std::string_view turtle_text) {
  turtle::Document doc = turtle::parse(turtle_text);
  Ontology onto;
  onto.prefixes = doc.prefixes;
  onto.triple_count = doc.triples.size();

  const std::string rdf_type = vocab::rdf("type").str();
  for (const auto& t : doc.triples) {
    if (!t.subject.is_iri() || t.predicate.value != rdf_type || !t.object.is_iri()) continue;
    auto kind = declared_kind(t.object.value);
    if (!kind) continue;
    Iri iri(t.subject.value);
    if (onto.concepts.count(iri)) continue;
    Concept c;
    c.iri = iri;
    c.kind = *kind;
    onto.concepts.emplace(iri, std::move(c));
  }

  const std::string label = vocab::rdfs("label").str();
  const std::string comment = vocab::rdfs("comment").str();
  const std::string domain = vocab::rdfs("domain").str();
  const std::string range = vocab::rdfs("range").str();
  const std::string sub_class = vocab::rdfs("subClassOf").str();
  const std::string sub_property = vocab::rdfs("subPropertyOf").str();
  const std::string inverse = vocab::owl("inverseOf").str();

  std::map<Iri, AnnotationPick> labels;
  std::map<Iri, AnnotationPick> comments;
  for (const auto& t : doc.triples) {
    if (!t.subject.is_iri()) continue;
    auto it = onto.concepts.find(Iri(t.subject.value));
    if (it == onto.concepts.end()) continue;
    Concept& c = it->second;
    const std::string& p = t.predicate.value;
    if (t.object.is_literal()) {
      if (p == label) labels[c.iri].offer(t.object);
      if (p == comment) comments[c.iri].offer(t.object);
      continue;
    }
    // Restriction bodies and other blank-node objects are not modeled.
    if (!t.object.is_iri()) continue;
    Iri object(t.object.value);
    if (p == sub_class || p == sub_property) {
      c.super.insert(object);
    } else if (c.kind != ConceptKind::Class) {
      if (p == domain) {
        c.domains.insert(object);
      } else if (p == range) {
        c.ranges.insert(object);
      } else if (p == inverse && !c.inverse_of) {
        c.inverse_of = object;
      }
    }
  }
  for (auto& [iri, pick] : labels) onto.concepts[iri].label = pick.value;
  for (auto& [iri, pick] : comments) onto.concepts[iri].comment = pick.value;
  return onto;
}

Ontology load_ontology(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open ontology file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  return parse_ontology(text);
}

std::size_t statement_count(const Concept& c) {
  return 1 + (c.label ? 1 : 0) + (c.comment ? 1 : 0) + c.domains.size() + c.ranges.size() + c.super.size() +
         (c.inverse_of ? 1 : 0);
}

std::set<Iri> vocabulary(const Ontology& ontology) {
  std::set<Iri> out;
  for (const auto& [iri, c] : ontology.concepts) {
    out.insert(iri);
    out.insert(c.domains.begin(), c.domains.end());
    out.insert(c.ranges.begin(), c.ranges.end());
    out.insert(c.super.begin(), c.super.end());
    if (c.inverse_of) out.insert(*c.inverse_of);
  }
  return out;
}

}  // namespace ontorag
