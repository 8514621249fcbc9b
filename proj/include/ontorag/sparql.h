#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "ontorag/iri.h"

namespace ontorag::sparql {

enum class QueryForm { Select, Construct, Ask, Describe };

struct ParsedQuery {
  QueryForm form = QueryForm::Select;
  // Prefixes in effect after the prologue (fallbacks merged with the
  // query's own PREFIX declarations, which take precedence).
  std::map<std::string, std::string> prefixes;
  // IRIs in subject, predicate (including inside property paths) or object
  // position of any triple pattern, CONSTRUCT templates included.
  std::set<Iri> pattern_terms;
};

// Parses a SPARQL 1.1 query. `fallback_prefixes` resolve prefixed names the
// query uses without declaring. Throws ParseError.
ParsedQuery parse_query(std::string_view query, const std::map<std::string, std::string>& fallback_prefixes = {});

}  // namespace ontorag::sparql
