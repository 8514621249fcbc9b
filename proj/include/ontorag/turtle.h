#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ontorag::turtle {

enum class TermKind { Iri, BlankNode, Literal };

struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;     // IRI text, blank node label, or literal lexical form
  std::string language;  // literals only, lower-cased
  std::string datatype;  // literals only, empty for plain strings

  bool is_iri() const { return kind == TermKind::Iri; }
  bool is_blank() const { return kind == TermKind::BlankNode; }
  bool is_literal() const { return kind == TermKind::Literal; }
  friend bool operator==(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;
  std::size_t line = 0;
};

struct Document {
  std::vector<Triple> triples;
  // Prefix label (without the colon) to namespace IRI, last declaration wins.
  std::map<std::string, std::string> prefixes;
};

// Parses a complete Turtle document. Throws SyntaxError with the 1-based
// line of the offending token.
Document parse(std::string_view text);

}  // namespace ontorag::turtle
