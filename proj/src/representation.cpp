#include "ontorag/representation.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <vector>

#include "ontorag/tokens.h"

namespace ontorag {

std::string_view to_string(Format format) {
  switch (format) {
    case Format::Graph: return "graph";
    case Format::Table: return "table";
    case Format::TableSorted: return "table-sorted";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "graph") return Format::Graph;
  if (name == "table") return Format::Table;
  if (name == "table-sorted") return Format::TableSorted;
  return std::nullopt;
}

namespace {

bool valid_local_part(std::string_view local) {
  if (local.empty()) return false;
  if (local.front() == '-') return false;
  for (unsigned char c : local) {
    if (!(std::isalnum(c) || c == '_' || c == '-' || c >= 0x80)) return false;
  }
  return true;
}

std::string full_iri(const std::string& iri) {
  std::string out = "<";
  for (unsigned char c : iri) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`' ||
        c == '\\') {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out + ">";
}

std::string write_iri(const Ontology& onto, const Iri& iri) {
  const std::string& s = iri.str();
  const std::string* best_label = nullptr;
  std::size_t best_len = 0;
  for (const auto& [label, ns] : onto.prefixes) {
    if (ns.empty() || ns.size() < best_len || s.size() <= ns.size()) continue;
    if (s.compare(0, ns.size(), ns) != 0) continue;
    if (!valid_local_part(std::string_view(s).substr(ns.size()))) continue;
    if (ns.size() > best_len) {
      best_len = ns.size();
      best_label = &label;
    }
  }
  if (best_label) return *best_label + ":" + s.substr(best_len);
  return full_iri(s);
}

std::string write_literal(const std::string& value) {
  std::string out = "\"";
  for (char c : value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

Iri type_iri(ConceptKind kind) {
  switch (kind) {
    case ConceptKind::Class: return vocab::owl("Class");
    case ConceptKind::ObjectProperty: return vocab::owl("ObjectProperty");
    case ConceptKind::DatatypeProperty: return vocab::owl("DatatypeProperty");
    case ConceptKind::AnnotationProperty: return vocab::owl("AnnotationProperty");
  }
  return {};
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(c);
  }
  return out;
}

std::string class_entry(const Concept* c, const Iri& iri, bool include_descriptions) {
  std::string out = local_name(iri);
  if (include_descriptions && c && c->comment && !c->comment->empty()) {
    out += " (" + collapse_whitespace(*c->comment) + ")";
  }
  return out;
}

// Orders IRIs by local name, then by full IRI.
bool by_name(const Iri& a, const Iri& b) {
  auto la = local_name(a);
  auto lb = local_name(b);
  if (la != lb) return la < lb;
  return a < b;
}

std::vector<const Concept*> sorted_by_name(const Ontology& onto, ConceptKind kind) {
  std::vector<const Concept*> out;
  for (const auto& [iri, c] : onto.concepts) {
    if (c.kind == kind) out.push_back(&c);
  }
  std::sort(out.begin(), out.end(), [](const Concept* a, const Concept* b) { return by_name(a->iri, b->iri); });
  return out;
}

std::vector<std::string> names_or_unknown(const std::set<Iri>& iris) {
  std::vector<Iri> sorted(iris.begin(), iris.end());
  std::sort(sorted.begin(), sorted.end(), by_name);
  std::vector<std::string> out;
  for (const auto& i : sorted) out.push_back(local_name(i));
  if (out.empty()) out.push_back("?");
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

RenderedContext finish(Format format, std::string text, std::size_t concepts) {
  RenderedContext ctx;
  ctx.format = format;
  ctx.token_estimate = estimate_tokens(text);
  ctx.text = std::move(text);
  ctx.concept_count = concepts;
  return ctx;
}

std::size_t tabular_concept_count(const Ontology& onto) {
  return onto.concepts.size() - onto.count(ConceptKind::AnnotationProperty);
}

}  // namespace

std::string turtle_prefix_header(const Ontology& ontology) {
  std::string out;
  for (const auto& [label, ns] : ontology.prefixes) out += "@prefix " + label + ": " + full_iri(ns) + " .\n";
  return out;
}

std::string turtle_block(const Ontology& ontology, const Concept& c) {
  std::vector<std::string> statements;
  statements.push_back("a " + write_iri(ontology, type_iri(c.kind)));
  if (c.label) statements.push_back(write_iri(ontology, vocab::rdfs("label")) + " " + write_literal(*c.label));
  if (c.comment) statements.push_back(write_iri(ontology, vocab::rdfs("comment")) + " " + write_literal(*c.comment));
  auto objects = [&](const std::set<Iri>& iris) {
    std::vector<std::string> parts;
    for (const auto& i : iris) parts.push_back(write_iri(ontology, i));
    return join(parts, ", ");
  };
  if (!c.super.empty()) {
    auto pred = c.kind == ConceptKind::Class ? vocab::rdfs("subClassOf") : vocab::rdfs("subPropertyOf");
    statements.push_back(write_iri(ontology, pred) + " " + objects(c.super));
  }
  if (!c.domains.empty()) statements.push_back(write_iri(ontology, vocab::rdfs("domain")) + " " + objects(c.domains));
  if (!c.ranges.empty()) statements.push_back(write_iri(ontology, vocab::rdfs("range")) + " " + objects(c.ranges));
  if (c.inverse_of) {
    statements.push_back(write_iri(ontology, vocab::owl("inverseOf")) + " " + write_iri(ontology, *c.inverse_of));
  }
  return write_iri(ontology, c.iri) + " " + join(statements, " ;\n    ") + " .\n";
}

RenderedContext to_graph(const Ontology& ontology) {
  std::string text = turtle_prefix_header(ontology);
  bool first = true;
  for (const auto& [iri, c] : ontology.concepts) {
    if (!first || !text.empty()) text += "\n";
    first = false;
    text += turtle_block(ontology, c);
  }
  return finish(Format::Graph, std::move(text), ontology.concepts.size());
}

RenderedContext to_table(const Ontology& ontology, bool include_descriptions) {
  std::vector<std::string> classes;
  for (const Concept* c : sorted_by_name(ontology, ConceptKind::Class)) {
    classes.push_back(class_entry(c, c->iri, include_descriptions));
  }
  std::vector<std::string> object_props;
  for (const Concept* p : sorted_by_name(ontology, ConceptKind::ObjectProperty)) {
    auto name = local_name(p->iri);
    for (const auto& d : names_or_unknown(p->domains)) {
      for (const auto& r : names_or_unknown(p->ranges)) object_props.push_back("(" + d + ", " + name + ", " + r + ")");
    }
  }
  std::vector<std::string> datatype_props;
  for (const Concept* p : sorted_by_name(ontology, ConceptKind::DatatypeProperty)) {
    auto name = local_name(p->iri);
    for (const auto& d : names_or_unknown(p->domains)) datatype_props.push_back("(" + d + ", " + name + ", LITERAL)");
  }
  std::string text = "Classes:\n" + join(classes, ", ") + "\nObject properties:\n" + join(object_props, ", ") +
                     "\nDatatype properties:\n" + join(datatype_props, ", ");
  return finish(Format::Table, std::move(text), tabular_concept_count(ontology));
}

RenderedContext to_table_sorted(const Ontology& ontology, bool include_descriptions) {
  // Blocks exist for declared classes and for any class named as a domain.
  std::map<Iri, std::vector<std::pair<std::string, std::string>>> blocks;
  for (const auto& [iri, c] : ontology.concepts) {
    if (c.kind == ConceptKind::Class) blocks[iri];
  }
  std::vector<std::pair<std::string, std::string>> unassigned;
  for (const auto& [iri, c] : ontology.concepts) {
    if (c.kind != ConceptKind::ObjectProperty && c.kind != ConceptKind::DatatypeProperty) continue;
    std::vector<std::string> targets;
    if (c.kind == ConceptKind::ObjectProperty) {
      targets = names_or_unknown(c.ranges);
    } else {
      targets = {"LITERAL"};
    }
    auto name = local_name(iri);
    for (const auto& t : targets) {
      if (c.domains.empty()) {
        unassigned.emplace_back(name, t);
      } else {
        for (const auto& d : c.domains) blocks[d].emplace_back(name, t);
      }
    }
  }

  std::vector<Iri> order;
  for (const auto& [iri, lines] : blocks) order.push_back(iri);
  std::sort(order.begin(), order.end(), by_name);

  std::string text;
  auto emit_lines = [&](std::vector<std::pair<std::string, std::string>>& lines) {
    std::sort(lines.begin(), lines.end());
    for (const auto& [prop, target] : lines) text += "  " + prop + " -> " + target + "\n";
  };
  for (const auto& iri : order) {
    text += class_entry(ontology.find(iri), iri, include_descriptions) + "\n";
    emit_lines(blocks[iri]);
  }
  if (!unassigned.empty()) {
    text += "Unassigned:\n";
    emit_lines(unassigned);
  }
  return finish(Format::TableSorted, std::move(text), tabular_concept_count(ontology));
}

RenderedContext render(const Ontology& ontology, Format format, bool include_descriptions) {
  switch (format) {
    case Format::Graph: return to_graph(ontology);
    case Format::Table: return to_table(ontology, include_descriptions);
    case Format::TableSorted: return to_table_sorted(ontology, include_descriptions);
  }
  return to_graph(ontology);
}

}  // namespace ontorag
