#pragma once

#include <string>
#include <vector>

#include "ontorag/ontology.h"

namespace ontorag {

// Template placeholders: {label}, {superclasses}, {properties}, {domain},
// {range}. Lists are rendered as comma-separated local names, or "none".
struct EnrichmentRule {
  std::string name;
  ConceptKind applies_to = ConceptKind::Class;
  std::string template_text;

  void validate() const;  // throws ConfigError on unknown placeholders
};

// One class rule and one rule per property kind.
std::vector<EnrichmentRule> default_enrichment_rules();

// JSON document: {"rules": [{"name", "kind", "template"}, ...]} where kind
// is one of Class, ObjectProperty, DatatypeProperty, AnnotationProperty.
std::vector<EnrichmentRule> load_enrichment_rules(const std::string& path);
std::vector<EnrichmentRule> parse_enrichment_rules(const std::string& json_text);

// Gives every concept without a comment a description generated by the
// first rule for its kind. Existing comments are kept as they are.
Ontology enrich(const Ontology& ontology, const std::vector<EnrichmentRule>& rules);

// Description the rule produces for `concept_` in the context of `ontology`.
std::string describe(const Ontology& ontology, const Concept& concept_, const EnrichmentRule& rule);

}  // namespace ontorag
