#include "ontorag/enrichment.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ontorag/errors.h"
#include "ontorag/text_template.h"

namespace ontorag {
namespace {

const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> kNames = {"label", "superclasses", "properties", "domain", "range"};
  return kNames;
}

ConceptKind parse_kind(const std::string& name) {
  if (name == "Class") return ConceptKind::Class;
  if (name == "ObjectProperty") return ConceptKind::ObjectProperty;
  if (name == "DatatypeProperty") return ConceptKind::DatatypeProperty;
  if (name == "AnnotationProperty") return ConceptKind::AnnotationProperty;
  throw ConfigError("unknown concept kind in enrichment rule: " + name);
}

std::string name_list(std::vector<std::string> names) {
  if (names.empty()) return "none";
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

std::vector<std::string> local_names(const std::set<Iri>& iris) {
  std::vector<std::string> out;
  for (const auto& i : iris) out.push_back(local_name(i));
  return out;
}

}  // namespace

void EnrichmentRule::validate() const {
  for (const auto& p : placeholders(template_text)) {
    if (!known_placeholders().count(p)) {
      throw ConfigError("enrichment rule '" + name + "' uses unknown placeholder {" + p + "}");
    }
  }
}

std::vector<EnrichmentRule> default_enrichment_rules() {
  return {
      {"class-summary", ConceptKind::Class,
       "{label} is a class. Superclasses: {superclasses}. Related properties: {properties}."},
      {"object-property-summary", ConceptKind::ObjectProperty,
       "{label} is a relation that links {domain} to {range}."},
      {"datatype-property-summary", ConceptKind::DatatypeProperty,
       "{label} is an attribute of {domain} with values of type {range}."},
  };
}

std::vector<EnrichmentRule> parse_enrichment_rules(const std::string& json_text) {
  std::vector<EnrichmentRule> rules;
  try {
    auto doc = nlohmann::json::parse(json_text);
    for (const auto& r : doc.at("rules")) {
      EnrichmentRule rule{r.at("name").get<std::string>(), parse_kind(r.at("kind").get<std::string>()),
                          r.at("template").get<std::string>()};
      rule.validate();
      rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed enrichment rules: ") + e.what());
  }
  return rules;
}

std::vector<EnrichmentRule> load_enrichment_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open enrichment rules file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_enrichment_rules(buf.str());
}

std::string describe(const Ontology& ontology, const Concept& c, const EnrichmentRule& rule) {
  std::vector<std::string> incident;
  if (c.kind == ConceptKind::Class) {
    for (const auto& [iri, p] : ontology.concepts) {
      if (p.is_property() && (p.domains.count(c.iri) || p.ranges.count(c.iri))) incident.push_back(local_name(iri));
    }
  }
  std::map<std::string, std::string> values = {
      {"label", c.label && !c.label->empty() ? *c.label : local_name(c.iri)},
      {"superclasses", name_list(local_names(c.super))},
      {"properties", name_list(incident)},
      {"domain", name_list(local_names(c.domains))},
      {"range", name_list(local_names(c.ranges))},
  };
  return fill_template(rule.template_text, values);
}

Ontology enrich(const Ontology& ontology, const std::vector<EnrichmentRule>& rules) {
  Ontology out = ontology;
  for (auto& [iri, c] : out.concepts) {
    if (c.comment) continue;
    auto rule = std::find_if(rules.begin(), rules.end(), [&](const EnrichmentRule& r) { return r.applies_to == c.kind; });
    if (rule == rules.end()) continue;
    // Describe against the input so results do not depend on visit order.
    c.comment = describe(ontology, ontology.concepts.at(iri), *rule);
    ++out.triple_count;
  }
  return out;
}

}  // namespace ontorag
