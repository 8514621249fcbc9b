#include "ontorag/selection.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "ontorag/errors.h"
#include "ontorag/representation.h"

namespace ontorag {

std::string_view to_string(SelectionVariant variant) {
  switch (variant) {
    case SelectionVariant::OntA: return "OntA";
    case SelectionVariant::OntB: return "OntB";
    case SelectionVariant::OntC: return "OntC";
    case SelectionVariant::OntD: return "OntD";
  }
  return "?";
}

std::optional<SelectionVariant> parse_variant(std::string_view name) {
  if (name == "OntA" || name == "Ont_A" || name == "A") return SelectionVariant::OntA;
  if (name == "OntB" || name == "Ont_B" || name == "B") return SelectionVariant::OntB;
  if (name == "OntC" || name == "Ont_C" || name == "C") return SelectionVariant::OntC;
  if (name == "OntD" || name == "Ont_D" || name == "D") return SelectionVariant::OntD;
  return std::nullopt;
}

std::set<Iri> SelectionConfig::default_keep_predicates() {
  return {vocab::rdf("type"),    vocab::rdfs("label"),      vocab::rdfs("domain"),
          vocab::rdfs("range"),  vocab::rdfs("subClassOf"), vocab::rdfs("subPropertyOf")};
}

void SelectionConfig::validate() const {
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
  if (token_budget < 1) throw ConfigError("token_budget must be at least 1");
}

Concept strip_to_kept(const Concept& c, const std::set<Iri>& keep) {
  auto kept = [&](const Iri& predicate) { return keep.count(predicate) != 0; };
  Concept out;
  out.iri = c.iri;
  out.kind = c.kind;
  if (kept(vocab::rdfs("label"))) out.label = c.label;
  if (kept(vocab::rdfs("comment"))) out.comment = c.comment;
  if (kept(vocab::rdfs("domain"))) out.domains = c.domains;
  if (kept(vocab::rdfs("range"))) out.ranges = c.ranges;
  auto super_predicate = c.kind == ConceptKind::Class ? vocab::rdfs("subClassOf") : vocab::rdfs("subPropertyOf");
  if (kept(super_predicate)) out.super = c.super;
  if (kept(vocab::owl("inverseOf"))) out.inverse_of = c.inverse_of;
  return out;
}

namespace {

std::size_t count_statements(const Ontology& onto) {
  std::size_t n = 0;
  for (const auto& [iri, c] : onto.concepts) n += statement_count(c);
  return n;
}

}  // namespace

NaiveReduction naive_reduce(const Ontology& ontology, const SelectionConfig& config) {
  config.validate();
  NaiveReduction result;
  Ontology& out = result.ontology;
  out.prefixes = ontology.prefixes;
  for (const auto& [iri, c] : ontology.concepts) out.concepts.emplace(iri, strip_to_kept(c, config.keep_predicates));

  // Byte size of to_graph(out) is header + blocks + one separator before
  // every block except a leading block with no header.
  std::string header = turtle_prefix_header(out);
  std::map<Iri, std::size_t> block_bytes;
  std::size_t total = header.size();
  for (const auto& [iri, c] : out.concepts) {
    block_bytes[iri] = turtle_block(out, c).size();
    total += block_bytes[iri] + 1;
  }
  if (header.empty() && !out.concepts.empty()) total -= 1;

  if ((total + 3) / 4 > config.token_budget) {
    std::map<Iri, std::size_t> degree;
    for (const auto& [iri, c] : out.concepts) {
      degree[iri] += c.domains.size() + c.ranges.size() + c.super.size() + (c.inverse_of ? 1 : 0);
      auto bump = [&](const Iri& ref) {
        if (out.contains(ref)) ++degree[ref];
      };
      for (const auto& r : c.domains) bump(r);
      for (const auto& r : c.ranges) bump(r);
      for (const auto& r : c.super) bump(r);
      if (c.inverse_of) bump(*c.inverse_of);
    }
    std::vector<Iri> order;
    for (const auto& [iri, c] : out.concepts) order.push_back(iri);
    std::sort(order.begin(), order.end(), [&](const Iri& a, const Iri& b) {
      auto key = [&](const Iri& i) { return std::make_tuple(out.concepts.at(i).label.has_value(), degree[i]); };
      if (key(a) != key(b)) return key(a) < key(b);
      return a < b;
    });
    for (const auto& iri : order) {
      if ((total + 3) / 4 <= config.token_budget) break;
      std::size_t remaining = out.concepts.size() - 1;
      total -= block_bytes[iri];
      // Separator attached to this block (or, for the last block without a
      // header, there is none left).
      if (remaining > 0 || !header.empty()) total -= 1;
      out.concepts.erase(iri);
      result.dropped.push_back(iri);
    }
    result.truncated = !result.dropped.empty();
  }
  out.triple_count = count_statements(out);
  result.token_estimate = to_graph(out).token_estimate;
  return result;
}

std::set<Iri> neighbor_closure(const Ontology& ontology, const std::set<Iri>& seeds) {
  std::set<Iri> result;
  auto add_declared = [&](const Iri& iri) {
    if (ontology.contains(iri)) result.insert(iri);
  };
  for (const auto& s : seeds) add_declared(s);

  for (const auto& s : seeds) {
    const Concept* c = ontology.find(s);
    if (!c) continue;
    if (c->kind == ConceptKind::Class) {
      for (const auto& sup : c->super) add_declared(sup);
      for (const auto& [iri, p] : ontology.concepts) {
        if (!p.is_property()) continue;
        if (p.domains.count(s) || p.ranges.count(s)) result.insert(iri);
      }
    } else {
      for (const auto& d : c->domains) add_declared(d);
      for (const auto& r : c->ranges) add_declared(r);
      if (c->inverse_of) add_declared(*c->inverse_of);
      for (const auto& [iri, p] : ontology.concepts) {
        if (p.inverse_of && *p.inverse_of == s) result.insert(iri);
      }
    }
  }

  std::set<Iri> properties;
  for (const auto& iri : result) {
    if (ontology.find(iri)->is_property()) properties.insert(iri);
  }
  for (const auto& iri : properties) {
    const Concept* p = ontology.find(iri);
    for (const auto& d : p->domains) add_declared(d);
    for (const auto& r : p->ranges) add_declared(r);
  }
  return result;
}

ContextSelection context_reduce(const Ontology& ontology, std::string_view question, const ConceptIndex& index,
                                const Embedder& embedder, const SelectionConfig& config, bool rich) {
  config.validate();
  if (index.empty()) throw EmptyIndex();
  ContextSelection result;
  auto ranked = rank(index, embedder.embed(question));
  std::set<Iri> seeds;
  for (const auto& hit : ranked) {
    if (result.ranked.size() >= config.top_k) break;
    if (!ontology.contains(hit.iri)) continue;
    result.ranked.push_back(hit);
    seeds.insert(hit.iri);
  }

  std::set<Iri> chosen = config.include_neighbors ? neighbor_closure(ontology, seeds) : seeds;
  Ontology& out = result.ontology;
  out.prefixes = ontology.prefixes;
  for (const auto& iri : chosen) {
    const Concept& c = ontology.concepts.at(iri);
    out.concepts.emplace(iri, rich ? c : strip_to_kept(c, config.keep_predicates));
  }
  out.triple_count = count_statements(out);
  return result;
}

}  // namespace ontorag
