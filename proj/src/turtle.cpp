#include "ontorag/turtle.h"

#include <cctype>
#include <cstdint>

#include "ontorag/errors.h"
#include "ontorag/iri.h"

namespace ontorag::turtle {
namespace {

constexpr std::string_view kRdfNs = vocab::kRdf;
constexpr std::string_view kXsdNs = vocab::kXsd;

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_pn_chars_base(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_pn_chars(unsigned char c) {
  return is_pn_chars_base(c) || std::isdigit(c) || c == '_' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    skip_ws();
    while (!at_end()) {
      statement();
      skip_ws();
    }
    return std::move(doc_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::string base_;
  std::size_t blank_counter_ = 0;
  Document doc_;

  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(line_, message); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char get() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') get();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      fail(std::string("expected '") + c + "'" + (at_end() ? " at end of input" : std::string(", found '") + peek() + "'"));
    }
    get();
  }

  bool keyword_ahead(std::string_view word, bool case_insensitive) const {
    if (pos_ + word.size() > text_.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
      char a = text_[pos_ + i];
      char b = word[i];
      if (case_insensitive ? std::tolower(static_cast<unsigned char>(a)) != b : a != b) return false;
    }
    char after = peek(word.size());
    return after == '\0' || !(std::isalnum(static_cast<unsigned char>(after)) || after == '_' || after == ':');
  }

  void add(const Term& s, const Term& p, const Term& o, std::size_t line) {
    doc_.triples.push_back(Triple{s, p, o, line});
  }

  Term fresh_blank() {
    Term t;
    t.kind = TermKind::BlankNode;
    t.value = "genid" + std::to_string(++blank_counter_);
    return t;
  }

  static Term iri_term(std::string v) {
    Term t;
    t.kind = TermKind::Iri;
    t.value = std::move(v);
    return t;
  }

  void statement() {
    if (peek() == '@') {
      if (keyword_ahead("@prefix", false)) {
        pos_ += 7;
        prefix_decl();
        expect('.');
        return;
      }
      if (keyword_ahead("@base", false)) {
        pos_ += 5;
        base_decl();
        expect('.');
        return;
      }
      fail("unknown directive");
    }
    if (keyword_ahead("prefix", true)) {
      pos_ += 6;
      prefix_decl();
      return;
    }
    if (keyword_ahead("base", true)) {
      pos_ += 4;
      base_decl();
      return;
    }
    triples();
    expect('.');
  }

  void prefix_decl() {
    skip_ws();
    std::string label;
    while (!at_end() && peek() != ':') {
      unsigned char c = static_cast<unsigned char>(peek());
      if (!(is_pn_chars(c) || c == '.')) fail("invalid prefix label");
      label += get();
    }
    if (at_end()) fail("expected ':' in prefix declaration");
    get();
    skip_ws();
    if (peek() != '<') fail("expected IRI in prefix declaration");
    doc_.prefixes[label] = iriref();
  }

  void base_decl() {
    skip_ws();
    if (peek() != '<') fail("expected IRI in base declaration");
    base_ = iriref();
  }

  void triples() {
    skip_ws();
    Term subject;
    if (peek() == '[') {
      subject = blank_node_property_list();
      skip_ws();
      if (peek() == '.') return;
    } else {
      subject = subject_term();
    }
    predicate_object_list(subject);
  }

  Term subject_term() {
    skip_ws();
    char c = peek();
    if (c == '<') return iri_term(iriref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '(') return collection();
    if (c == '"' || c == '\'') fail("literal cannot be a subject");
    return iri_term(prefixed_name());
  }

  void predicate_object_list(const Term& subject) {
    while (true) {
      skip_ws();
      Term predicate = verb();
      object_list(subject, predicate);
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        get();
        skip_ws();
      }
      char c = peek();
      if (c == '.' || c == ']' || at_end()) return;
    }
  }

  Term verb() {
    skip_ws();
    if (peek() == 'a') {
      char after = peek(1);
      if (after == '\0' || after == ' ' || after == '\t' || after == '\n' || after == '\r' || after == '<' ||
          after == '[' || after == '"' || after == '(' || after == '_' || after == '#') {
        get();
        return iri_term(std::string(kRdfNs) + "type");
      }
    }
    if (peek() == '<') return iri_term(iriref());
    return iri_term(prefixed_name());
  }

  void object_list(const Term& subject, const Term& predicate) {
    while (true) {
      std::size_t line = line_;
      Term obj = object();
      add(subject, predicate, obj, line);
      skip_ws();
      if (peek() != ',') return;
      get();
    }
  }

  Term object() {
    skip_ws();
    char c = peek();
    if (at_end()) fail("expected object at end of input");
    if (c == '<') return iri_term(iriref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_node_property_list();
    if (c == '(') return collection();
    if (c == '"' || c == '\'') return rdf_literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return numeric_literal();
    }
    if (keyword_ahead("true", false) || keyword_ahead("false", false)) {
      Term t;
      t.kind = TermKind::Literal;
      t.value = c == 't' ? "true" : "false";
      t.datatype = std::string(kXsdNs) + "boolean";
      pos_ += t.value.size();
      return t;
    }
    return iri_term(prefixed_name());
  }

  Term blank_node_property_list() {
    expect('[');
    Term node = fresh_blank();
    skip_ws();
    if (peek() != ']') predicate_object_list(node);
    expect(']');
    return node;
  }

  Term collection() {
    expect('(');
    std::vector<std::pair<Term, std::size_t>> items;
    while (true) {
      skip_ws();
      if (at_end()) fail("unterminated collection");
      if (peek() == ')') {
        get();
        break;
      }
      std::size_t line = line_;
      items.emplace_back(object(), line);
    }
    Term nil = iri_term(std::string(kRdfNs) + "nil");
    if (items.empty()) return nil;
    Term head = fresh_blank();
    Term current = head;
    Term first = iri_term(std::string(kRdfNs) + "first");
    Term rest = iri_term(std::string(kRdfNs) + "rest");
    for (std::size_t i = 0; i < items.size(); ++i) {
      add(current, first, items[i].first, items[i].second);
      Term next = i + 1 < items.size() ? fresh_blank() : nil;
      add(current, rest, next, items[i].second);
      current = next;
    }
    return head;
  }

  Term blank_label() {
    pos_ += 2;
    std::string label;
    while (!at_end()) {
      unsigned char c = static_cast<unsigned char>(peek());
      if (is_pn_chars(c) || (c == '.' && is_pn_chars(static_cast<unsigned char>(peek(1))))) {
        label += get();
      } else {
        break;
      }
    }
    if (label.empty()) fail("empty blank node label");
    Term t;
    t.kind = TermKind::BlankNode;
    t.value = "b_" + label;
    return t;
  }

  std::uint32_t hex_code(std::size_t digits) {
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char h = at_end() ? '\0' : get();
      cp <<= 4;
      if (h >= '0' && h <= '9') {
        cp |= static_cast<std::uint32_t>(h - '0');
      } else if (h >= 'a' && h <= 'f') {
        cp |= static_cast<std::uint32_t>(h - 'a' + 10);
      } else if (h >= 'A' && h <= 'F') {
        cp |= static_cast<std::uint32_t>(h - 'A' + 10);
      } else {
        fail("invalid unicode escape");
      }
    }
    return cp;
  }

  std::string iriref() {
    get();  // '<'
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = get();
      if (c == '>') break;
      if (c == '\\') {
        char kind = at_end() ? '\0' : get();
        if (kind == 'u') {
          append_utf8(value, hex_code(4));
        } else if (kind == 'U') {
          append_utf8(value, hex_code(8));
        } else {
          fail("invalid escape in IRI");
        }
        continue;
      }
      if (c == ' ' || c == '\n' || c == '\t' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`') {
        fail(std::string("invalid character in IRI: '") + c + "'");
      }
      value += c;
    }
    return resolve_iri(base_, value);
  }

  std::string prefixed_name() {
    std::string prefix;
    std::size_t start = pos_;
    while (!at_end() && peek() != ':') {
      unsigned char c = static_cast<unsigned char>(peek());
      bool ok = prefix.empty() ? is_pn_chars_base(c) : (is_pn_chars(c) || c == '.');
      if (!ok) break;
      prefix += get();
    }
    if (peek() != ':') {
      pos_ = start;
      if (at_end()) fail("unexpected end of input");
      fail(std::string("unexpected token '") + std::string(text_.substr(pos_, std::min<std::size_t>(12, text_.size() - pos_))) + "'");
    }
    if (!prefix.empty() && prefix.back() == '.') fail("prefix label may not end with '.'");
    get();  // ':'
    std::string local;
    while (!at_end()) {
      unsigned char c = static_cast<unsigned char>(peek());
      if (is_pn_chars(c) || c == ':' || (std::isdigit(c))) {
        local += get();
      } else if (c == '.') {
        unsigned char next = static_cast<unsigned char>(peek(1));
        if (is_pn_chars(next) || next == ':' || next == '%' || next == '\\' || next == '.') {
          local += get();
        } else {
          break;
        }
      } else if (c == '%') {
        local += get();
        for (int i = 0; i < 2; ++i) {
          if (!std::isxdigit(static_cast<unsigned char>(peek()))) fail("invalid percent escape");
          local += get();
        }
      } else if (c == '\\') {
        get();
        char e = at_end() ? '\0' : get();
        static constexpr std::string_view kEscapable = "_~.-!$&'()*+,;=/?#@%";
        if (kEscapable.find(e) == std::string_view::npos) fail("invalid local name escape");
        local += e;
      } else {
        break;
      }
    }
    auto it = doc_.prefixes.find(prefix);
    if (it == doc_.prefixes.end()) fail("undeclared prefix '" + prefix + ":'");
    return it->second + local;
  }

  Term rdf_literal() {
    Term t;
    t.kind = TermKind::Literal;
    t.value = string_literal();
    if (peek() == '@') {
      get();
      std::string lang;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        lang += static_cast<char>(std::tolower(static_cast<unsigned char>(get())));
      }
      if (lang.empty()) fail("empty language tag");
      t.language = lang;
    } else if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      t.datatype = peek() == '<' ? iriref() : prefixed_name();
    }
    return t;
  }

  std::string string_literal() {
    char quote = get();
    bool is_long = peek() == quote && peek(1) == quote;
    if (is_long) {
      pos_ += 2;
    } else if (peek() == quote) {
      get();
      return {};
    }
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = peek();
      if (is_long) {
        if (c == quote && peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          // A long string may end with up to two extra quote chars.
          while (peek() == quote) {
            value += quote;
            get();
          }
          break;
        }
      } else {
        if (c == quote) {
          get();
          break;
        }
        if (c == '\n' || c == '\r') fail("newline in short string literal");
      }
      get();
      if (c != '\\') {
        value += c;
        continue;
      }
      char e = at_end() ? '\0' : get();
      switch (e) {
        case 't': value += '\t'; break;
        case 'b': value += '\b'; break;
        case 'n': value += '\n'; break;
        case 'r': value += '\r'; break;
        case 'f': value += '\f'; break;
        case '"': value += '"'; break;
        case '\'': value += '\''; break;
        case '\\': value += '\\'; break;
        case 'u': append_utf8(value, hex_code(4)); break;
        case 'U': append_utf8(value, hex_code(8)); break;
        default: fail("invalid string escape");
      }
    }
    return value;
  }

  Term numeric_literal() {
    std::string lexical;
    if (peek() == '+' || peek() == '-') lexical += get();
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      lexical += get();
      digits = true;
    }
    std::string datatype = "integer";
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      lexical += get();
      while (std::isdigit(static_cast<unsigned char>(peek()))) lexical += get();
      datatype = "decimal";
      digits = true;
    }
    if (peek() == 'e' || peek() == 'E') {
      lexical += get();
      if (peek() == '+' || peek() == '-') lexical += get();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      while (std::isdigit(static_cast<unsigned char>(peek()))) lexical += get();
      datatype = "double";
    }
    if (!digits) fail("malformed number");
    Term t;
    t.kind = TermKind::Literal;
    t.value = lexical;
    t.datatype = std::string(kXsdNs) + datatype;
    return t;
  }
};

}  // namespace

Document parse(std::string_view text) {
  // Skip a UTF-8 byte order mark.
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.remove_prefix(3);
  return Parser(text).run();
}

}  // namespace ontorag::turtle
