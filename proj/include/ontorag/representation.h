#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ontorag/ontology.h"

namespace ontorag {

enum class Format { Graph, Table, TableSorted };

std::string_view to_string(Format format);  // "graph", "table", "table-sorted"
std::optional<Format> parse_format(std::string_view name);

struct RenderedContext {
  Format format = Format::Graph;
  std::string text;
  std::size_t token_estimate = 0;
  std::size_t concept_count = 0;
};

// Turtle: sorted prefix declarations, then one statement block per concept
// in ascending IRI order, blocks separated by a blank line.
RenderedContext to_graph(const Ontology& ontology);

// Pieces of to_graph, exposed so callers can size a rendering without
// re-rendering the whole ontology.
std::string turtle_prefix_header(const Ontology& ontology);
std::string turtle_block(const Ontology& ontology, const Concept& concept_);

// Three lists: classes, object property triples (domain, property, range),
// datatype property triples (domain, property, LITERAL). Local names only.
RenderedContext to_table(const Ontology& ontology, bool include_descriptions);

// One block per class with the properties whose domain includes it;
// domainless properties go to a trailing "Unassigned:" block.
RenderedContext to_table_sorted(const Ontology& ontology, bool include_descriptions);

RenderedContext render(const Ontology& ontology, Format format, bool include_descriptions = true);

}  // namespace ontorag
