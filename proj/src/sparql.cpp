#include "ontorag/sparql.h"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "ontorag/errors.h"

namespace ontorag::sparql {
namespace {

enum class Tok { IriRef, PName, Var, BNode, String, Number, LangTag, Name, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;    // unescaped value; for PName the expanded-later raw "pre:local"
  std::string prefix;  // PName only
  std::string local;   // PName only, escapes removed
  std::size_t pos = 0;
};

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

bool is_name_start(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_name_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80 || c == '_' || c == '-' || c == '.';
}
bool is_var_char(unsigned char c) { return std::isalnum(c) || c >= 0x80 || c == '_'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) {
        out.push_back(Token{Tok::End, "", "", "", pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::size_t at, const std::string& message) const { throw ParseError(at, message); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint32_t read_hex(std::size_t digits, std::size_t at) {
    if (pos_ + digits > text_.size()) fail(at, "truncated escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = text_[pos_++];
      if (!std::isxdigit(static_cast<unsigned char>(c))) fail(at, "bad hex escape");
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c))
                                                    ? c - '0'
                                                    : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
    }
    return cp;
  }

  Token next() {
    std::size_t start = pos_;
    unsigned char c = static_cast<unsigned char>(peek());
    if (c == '<') {
      if (auto iri = try_iriref()) return *iri;
    }
    if (c == '?' || c == '$') {
      if (is_var_char(static_cast<unsigned char>(peek(1)))) {
        ++pos_;
        std::string name;
        while (is_var_char(static_cast<unsigned char>(peek()))) name += text_[pos_++];
        return Token{Tok::Var, name, "", "", start};
      }
    }
    if (c == '"' || c == '\'') return string_token();
    if (c == '@') {
      ++pos_;
      std::string tag;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') tag += text_[pos_++];
      if (tag.empty() || !std::isalpha(static_cast<unsigned char>(tag[0]))) fail(start, "bad language tag");
      return Token{Tok::LangTag, tag, "", "", start};
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number_token();
    }
    if (c == '_' && peek(1) == ':') {
      pos_ += 2;
      std::string label;
      while (is_name_char(static_cast<unsigned char>(peek()))) label += text_[pos_++];
      while (!label.empty() && label.back() == '.') {
        label.pop_back();
        --pos_;
      }
      if (label.empty()) fail(start, "empty blank node label");
      return Token{Tok::BNode, label, "", "", start};
    }
    if (is_name_start(c) || c == ':') return name_or_pname();

    static const char* kMulti[] = {"^^", "&&", "||", "!=", "<=", ">="};
    for (const char* op : kMulti) {
      if (text_.substr(pos_, 2) == op) {
        pos_ += 2;
        return Token{Tok::Punct, op, "", "", start};
      }
    }
    static const std::string_view kSingle = "{}()[].;,*/|^!?+-=<>";
    if (kSingle.find(static_cast<char>(c)) != std::string_view::npos) {
      ++pos_;
      return Token{Tok::Punct, std::string(1, static_cast<char>(c)), "", "", start};
    }
    fail(start, std::string("unexpected character '") + static_cast<char>(c) + "'");
  }

  std::optional<Token> try_iriref() {
    std::size_t start = pos_;
    std::size_t p = pos_ + 1;
    std::string value;
    while (p < text_.size()) {
      unsigned char ch = static_cast<unsigned char>(text_[p]);
      if (ch == '>') {
        pos_ = p + 1;
        return Token{Tok::IriRef, value, "", "", start};
      }
      if (ch <= 0x20 || ch == '<' || ch == '"' || ch == '{' || ch == '}' || ch == '|' || ch == '^' ||
          ch == '`') {
        return std::nullopt;
      }
      if (ch == '\\') {
        if (p + 1 < text_.size() && (text_[p + 1] == 'u' || text_[p + 1] == 'U')) {
          std::size_t saved = pos_;
          pos_ = p + 2;
          append_utf8(value, read_hex(text_[p + 1] == 'u' ? 4 : 8, p));
          p = pos_;
          pos_ = saved;
          continue;
        }
        return std::nullopt;
      }
      value += static_cast<char>(ch);
      ++p;
    }
    return std::nullopt;
  }

  Token string_token() {
    std::size_t start = pos_;
    char quote = peek();
    bool longform = peek(1) == quote && peek(2) == quote;
    pos_ += longform ? 3 : 1;
    std::string value;
    while (true) {
      if (pos_ >= text_.size()) fail(start, "unterminated string");
      char ch = text_[pos_];
      if (longform) {
        if (ch == quote && peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          // A closing run longer than three belongs to the content.
          while (peek() == quote) {
            value += quote;
            ++pos_;
          }
          break;
        }
      } else {
        if (ch == quote) {
          ++pos_;
          break;
        }
        if (ch == '\n' || ch == '\r') fail(pos_, "newline in short string");
      }
      if (ch == '\\') {
        ++pos_;
        char e = peek();
        ++pos_;
        switch (e) {
          case 't': value += '\t'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 'b': value += '\b'; break;
          case 'f': value += '\f'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'u': append_utf8(value, read_hex(4, pos_ - 2)); break;
          case 'U': append_utf8(value, read_hex(8, pos_ - 2)); break;
          default: fail(pos_ - 2, "bad string escape");
        }
        continue;
      }
      value += ch;
      ++pos_;
    }
    return Token{Tok::String, value, "", "", start};
  }

  Token number_token() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t mark = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = mark;
      } else {
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    return Token{Tok::Number, std::string(text_.substr(start, pos_ - start)), "", "", start};
  }

  Token name_or_pname() {
    std::size_t start = pos_;
    std::string prefix;
    if (peek() != ':') {
      while (is_name_char(static_cast<unsigned char>(peek()))) prefix += text_[pos_++];
      while (!prefix.empty() && prefix.back() == '.') {
        prefix.pop_back();
        --pos_;
      }
      if (peek() != ':') return Token{Tok::Name, prefix, "", "", start};
    }
    ++pos_;  // ':'
    std::string local;
    std::size_t trailing_dots = 0;
    while (pos_ < text_.size()) {
      unsigned char ch = static_cast<unsigned char>(peek());
      if (std::isalnum(ch) || ch >= 0x80 || ch == '_' || ch == '-' || ch == ':') {
        local += static_cast<char>(ch);
        ++pos_;
        trailing_dots = 0;
      } else if (ch == '.') {
        if (local.empty()) break;
        local += '.';
        ++pos_;
        ++trailing_dots;
      } else if (ch == '%' && std::isxdigit(static_cast<unsigned char>(peek(1))) &&
                 std::isxdigit(static_cast<unsigned char>(peek(2)))) {
        local.append(text_.substr(pos_, 3));
        pos_ += 3;
        trailing_dots = 0;
      } else if (ch == '\\' && std::string_view("_~.-!$&'()*+,;=/?#@%").find(peek(1)) != std::string_view::npos &&
                 peek(1) != '\0') {
        local += peek(1);
        pos_ += 2;
        trailing_dots = 0;
      } else {
        break;
      }
    }
    pos_ -= trailing_dots;
    local.resize(local.size() - trailing_dots);
    Token t{Tok::PName, std::string(text_.substr(start, pos_ - start)), prefix, local, start};
    return t;
  }
};

const std::unordered_set<std::string>& builtin_names() {
  static const std::unordered_set<std::string> names = {
      "STR",      "LANG",      "LANGMATCHES", "DATATYPE",   "BOUND",    "IRI",       "URI",
      "BNODE",    "RAND",      "ABS",         "CEIL",       "FLOOR",    "ROUND",     "CONCAT",
      "STRLEN",   "UCASE",     "LCASE",       "ENCODE_FOR_URI",       "CONTAINS",  "STRSTARTS",
      "STRENDS",  "STRBEFORE", "STRAFTER",    "YEAR",       "MONTH",    "DAY",       "HOURS",
      "MINUTES",  "SECONDS",   "TIMEZONE",    "TZ",         "NOW",      "UUID",      "STRUUID",
      "MD5",      "SHA1",      "SHA256",      "SHA384",     "SHA512",   "COALESCE",  "IF",
      "STRLANG",  "STRDT",     "SAMETERM",    "ISIRI",      "ISURI",    "ISBLANK",   "ISLITERAL",
      "ISNUMERIC", "REGEX",    "SUBSTR",      "REPLACE"};
  return names;
}

const std::unordered_set<std::string>& aggregate_names() {
  static const std::unordered_set<std::string> names = {"COUNT", "SUM", "MIN", "MAX",
                                                        "AVG",   "SAMPLE", "GROUP_CONCAT"};
  return names;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::map<std::string, std::string>& fallback)
      : toks_(std::move(tokens)) {
    result_.prefixes = fallback;
  }

  ParsedQuery run() {
    prologue();
    if (keyword("SELECT")) {
      result_.form = QueryForm::Select;
      select_query();
    } else if (keyword("CONSTRUCT")) {
      result_.form = QueryForm::Construct;
      construct_query();
    } else if (keyword("DESCRIBE")) {
      result_.form = QueryForm::Describe;
      describe_query();
    } else if (keyword("ASK")) {
      result_.form = QueryForm::Ask;
      ask_query();
    } else {
      fail("expected SELECT, CONSTRUCT, DESCRIBE or ASK");
    }
    values_clause();
    if (cur().kind != Tok::End) fail("unexpected trailing input");
    return std::move(result_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::string base_;
  ParsedQuery result_;

  const Token& cur() const { return toks_[i_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(i_ + n, toks_.size() - 1)]; }
  void advance() {
    if (cur().kind != Tok::End) ++i_;
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = cur();
    std::string near = t.kind == Tok::End ? "end of query" : "'" + t.text + "'";
    throw ParseError(t.pos, message + " near " + near);
  }

  bool is_punct(std::string_view p, std::size_t n = 0) const {
    const Token& t = ahead(n);
    return t.kind == Tok::Punct && t.text == p;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    advance();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }

  bool is_keyword(std::string_view kw, std::size_t n = 0) const {
    const Token& t = ahead(n);
    return t.kind == Tok::Name && upper(t.text) == kw;
  }
  bool keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    advance();
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!keyword(kw)) fail("expected " + std::string(kw));
  }

  bool is_nil() const { return is_punct("(") && is_punct(")", 1); }

  void collect(Iri iri, bool on) {
    if (on) result_.pattern_terms.insert(std::move(iri));
  }

  // ---- terms

  bool at_iri() const { return cur().kind == Tok::IriRef || cur().kind == Tok::PName; }

  Iri iri() {
    const Token& t = cur();
    if (t.kind == Tok::IriRef) {
      std::string value = resolve_iri(base_, t.text);
      advance();
      return Iri(std::move(value));
    }
    if (t.kind == Tok::PName) {
      auto it = result_.prefixes.find(t.prefix);
      if (it == result_.prefixes.end()) fail("undeclared prefix '" + t.prefix + ":'");
      std::string value = it->second + t.local;
      advance();
      return Iri(std::move(value));
    }
    fail("expected IRI");
  }

  void prologue() {
    while (true) {
      if (keyword("BASE")) {
        if (cur().kind != Tok::IriRef) fail("expected IRI after BASE");
        base_ = resolve_iri(base_, cur().text);
        advance();
      } else if (keyword("PREFIX")) {
        if (cur().kind != Tok::PName || !cur().local.empty() || cur().text.back() != ':') {
          fail("expected prefix name after PREFIX");
        }
        std::string prefix = cur().prefix;
        advance();
        if (cur().kind != Tok::IriRef) fail("expected IRI after prefix name");
        result_.prefixes[prefix] = resolve_iri(base_, cur().text);
        advance();
      } else {
        return;
      }
    }
  }

  // ---- query forms

  void select_clause() {
    if (!keyword("DISTINCT")) keyword("REDUCED");
    if (accept("*")) return;
    bool any = false;
    while (true) {
      if (cur().kind == Tok::Var) {
        advance();
      } else if (is_punct("(") && !is_nil()) {
        advance();
        expression();
        expect_keyword("AS");
        if (cur().kind != Tok::Var) fail("expected variable after AS");
        advance();
        expect(")");
      } else {
        break;
      }
      any = true;
    }
    if (!any) fail("expected projection");
  }

  void dataset_clauses() {
    while (keyword("FROM")) {
      keyword("NAMED");
      iri();
    }
  }

  void select_query() {
    select_clause();
    dataset_clauses();
    where_clause();
    solution_modifier();
  }

  void construct_query() {
    if (is_punct("{")) {
      advance();
      if (!is_punct("}")) triples_block(true, false);
      expect("}");
      dataset_clauses();
      where_clause();
    } else {
      dataset_clauses();
      expect_keyword("WHERE");
      expect("{");
      if (!is_punct("}")) triples_block(true, false);
      expect("}");
    }
    solution_modifier();
  }

  void describe_query() {
    if (!accept("*")) {
      bool any = false;
      while (cur().kind == Tok::Var || at_iri()) {
        if (cur().kind == Tok::Var) {
          advance();
        } else {
          iri();
        }
        any = true;
      }
      if (!any) fail("expected DESCRIBE target");
    }
    dataset_clauses();
    if (is_keyword("WHERE") || is_punct("{")) where_clause();
    solution_modifier();
  }

  void ask_query() {
    dataset_clauses();
    where_clause();
    solution_modifier();
  }

  void where_clause() {
    keyword("WHERE");
    group_graph_pattern();
  }

  void solution_modifier() {
    if (is_keyword("GROUP")) {
      advance();
      expect_keyword("BY");
      bool any = false;
      while (true) {
        if (cur().kind == Tok::Var) {
          advance();
        } else if (is_punct("(")) {
          advance();
          expression();
          if (keyword("AS")) {
            if (cur().kind != Tok::Var) fail("expected variable after AS");
            advance();
          }
          expect(")");
        } else if (at_builtin() || at_iri()) {
          primary();
        } else {
          break;
        }
        any = true;
      }
      if (!any) fail("expected GROUP BY condition");
    }
    if (keyword("HAVING")) {
      constraint();
      while (is_punct("(") || at_builtin() || at_iri()) constraint();
    }
    if (is_keyword("ORDER")) {
      advance();
      expect_keyword("BY");
      bool any = false;
      while (true) {
        if (keyword("ASC") || keyword("DESC")) {
          bracketted_expression();
        } else if (cur().kind == Tok::Var) {
          advance();
        } else if (is_punct("(") || at_builtin() || at_iri()) {
          constraint();
        } else {
          break;
        }
        any = true;
      }
      if (!any) fail("expected ORDER BY condition");
    }
    for (int n = 0; n < 2; ++n) {
      if (keyword("LIMIT") || keyword("OFFSET")) {
        if (cur().kind != Tok::Number || cur().text.find_first_not_of("0123456789") != std::string::npos) {
          fail("expected integer");
        }
        advance();
      }
    }
  }

  void values_clause() {
    if (keyword("VALUES")) data_block();
  }

  void data_block_value() {
    if (at_iri()) {
      iri();
    } else if (cur().kind == Tok::String) {
      literal_tail();
    } else if (cur().kind == Tok::Number) {
      advance();
    } else if (is_punct("+") || is_punct("-")) {
      advance();
      if (cur().kind != Tok::Number) fail("expected number");
      advance();
    } else if (is_keyword("TRUE") || is_keyword("FALSE") || is_keyword("UNDEF")) {
      advance();
    } else {
      fail("expected data value");
    }
  }

  void data_block() {
    if (cur().kind == Tok::Var) {
      advance();
      expect("{");
      while (!is_punct("}")) data_block_value();
      expect("}");
      return;
    }
    std::size_t width = 0;
    if (is_nil()) {
      advance();
      advance();
    } else {
      expect("(");
      while (cur().kind == Tok::Var) {
        advance();
        ++width;
      }
      expect(")");
    }
    expect("{");
    while (!is_punct("}")) {
      if (is_nil()) {
        advance();
        advance();
        if (width != 0) fail("VALUES row width mismatch");
        continue;
      }
      expect("(");
      std::size_t n = 0;
      while (!is_punct(")")) {
        data_block_value();
        ++n;
      }
      if (n != width) fail("VALUES row width mismatch");
      expect(")");
    }
    expect("}");
  }

  // ---- graph patterns

  void group_graph_pattern() {
    expect("{");
    if (is_keyword("SELECT")) {
      advance();
      select_clause();
      where_clause();
      solution_modifier();
      values_clause();
    } else {
      group_graph_pattern_sub();
    }
    expect("}");
  }

  bool at_triples_start() const {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var:
      case Tok::IriRef:
      case Tok::PName:
      case Tok::BNode:
      case Tok::String:
      case Tok::Number:
        return true;
      case Tok::Name: {
        auto u = upper(t.text);
        return u == "TRUE" || u == "FALSE";
      }
      case Tok::Punct:
        return t.text == "[" || t.text == "(" || t.text == "+" || t.text == "-";
      default:
        return false;
    }
  }

  void group_graph_pattern_sub() {
    if (at_triples_start()) triples_block(true, true);
    while (true) {
      if (is_punct("{")) {
        group_graph_pattern();
        while (keyword("UNION")) group_graph_pattern();
      } else if (keyword("OPTIONAL") || keyword("MINUS")) {
        group_graph_pattern();
      } else if (keyword("GRAPH")) {
        var_or_iri();
        group_graph_pattern();
      } else if (keyword("SERVICE")) {
        keyword("SILENT");
        var_or_iri();
        group_graph_pattern();
      } else if (keyword("FILTER")) {
        constraint();
      } else if (keyword("BIND")) {
        expect("(");
        expression();
        expect_keyword("AS");
        if (cur().kind != Tok::Var) fail("expected variable after AS");
        advance();
        expect(")");
      } else if (keyword("VALUES")) {
        data_block();
      } else {
        break;
      }
      accept(".");
      if (at_triples_start()) triples_block(true, true);
    }
  }

  void var_or_iri() {
    if (cur().kind == Tok::Var) {
      advance();
    } else {
      iri();
    }
  }

  // TriplesBlock / TriplesTemplate. `paths` admits property paths.
  void triples_block(bool on, bool paths) {
    while (true) {
      triples_same_subject(on, paths);
      if (!accept(".")) return;
      if (!at_triples_start()) return;
    }
  }

  void triples_same_subject(bool on, bool paths) {
    if (is_punct("[") && !is_punct("]", 1)) {
      blank_node_property_list(on, paths);
      if (at_verb()) property_list_not_empty(on, paths);
    } else if (is_punct("(") && !is_nil()) {
      collection(on, paths);
      if (at_verb()) property_list_not_empty(on, paths);
    } else {
      var_or_term(on);
      property_list_not_empty(on, paths);
    }
  }

  bool at_verb() const {
    const Token& t = cur();
    if (t.kind == Tok::Var || t.kind == Tok::IriRef || t.kind == Tok::PName) return true;
    if (t.kind == Tok::Name && t.text == "a") return true;
    if (t.kind == Tok::Punct) return t.text == "^" || t.text == "!" || t.text == "(";
    return false;
  }

  void property_list_not_empty(bool on, bool paths) {
    verb(on, paths);
    object_list(on, paths);
    while (accept(";")) {
      if (!at_verb()) continue;
      verb(on, paths);
      object_list(on, paths);
    }
  }

  void verb(bool on, bool paths) {
    if (cur().kind == Tok::Var) {
      advance();
      return;
    }
    if (!paths) {
      if (cur().kind == Tok::Name && cur().text == "a") {
        advance();
        collect(vocab::rdf("type"), on);
        return;
      }
      collect(iri(), on);
      return;
    }
    path_alternative(on);
  }

  void path_alternative(bool on) {
    path_sequence(on);
    while (accept("|")) path_sequence(on);
  }

  void path_sequence(bool on) {
    path_elt_or_inverse(on);
    while (accept("/")) path_elt_or_inverse(on);
  }

  void path_elt_or_inverse(bool on) {
    accept("^");
    path_primary(on);
    // The modifier must touch the primary only grammatically; '?' adjacent
    // to a variable already lexed as a Var token.
    if (is_punct("?") || is_punct("*") || is_punct("+")) advance();
  }

  void path_primary(bool on) {
    if (cur().kind == Tok::Name && cur().text == "a") {
      advance();
      collect(vocab::rdf("type"), on);
    } else if (at_iri()) {
      collect(iri(), on);
    } else if (accept("!")) {
      if (accept("(")) {
        if (!is_punct(")")) {
          path_one_in_set(on);
          while (accept("|")) path_one_in_set(on);
        }
        expect(")");
      } else {
        path_one_in_set(on);
      }
    } else if (accept("(")) {
      path_alternative(on);
      expect(")");
    } else {
      fail("expected property path");
    }
  }

  void path_one_in_set(bool on) {
    accept("^");
    if (cur().kind == Tok::Name && cur().text == "a") {
      advance();
      collect(vocab::rdf("type"), on);
    } else {
      collect(iri(), on);
    }
  }

  void object_list(bool on, bool paths) {
    graph_node(on, paths);
    while (accept(",")) graph_node(on, paths);
  }

  void graph_node(bool on, bool paths) {
    if (is_punct("[") && !is_punct("]", 1)) {
      blank_node_property_list(on, paths);
    } else if (is_punct("(") && !is_nil()) {
      collection(on, paths);
    } else {
      var_or_term(on);
    }
  }

  void blank_node_property_list(bool on, bool paths) {
    expect("[");
    property_list_not_empty(on, paths);
    expect("]");
  }

  void collection(bool on, bool paths) {
    expect("(");
    std::size_t n = 0;
    while (!is_punct(")")) {
      if (cur().kind == Tok::End) fail("unterminated collection");
      graph_node(on, paths);
      ++n;
    }
    expect(")");
    if (n > 0) {
      collect(vocab::rdf("first"), on);
      collect(vocab::rdf("rest"), on);
      collect(vocab::rdf("nil"), on);
    }
  }

  void var_or_term(bool on) {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var:
      case Tok::BNode:
        advance();
        return;
      case Tok::IriRef:
      case Tok::PName:
        collect(iri(), on);
        return;
      case Tok::String:
        literal_tail();
        return;
      case Tok::Number:
        advance();
        return;
      case Tok::Name:
        if (is_keyword("TRUE") || is_keyword("FALSE")) {
          advance();
          return;
        }
        break;
      case Tok::Punct:
        if (is_nil()) {
          advance();
          advance();
          collect(vocab::rdf("nil"), on);
          return;
        }
        if (is_punct("[") && is_punct("]", 1)) {
          advance();
          advance();
          return;
        }
        if ((t.text == "+" || t.text == "-") && ahead(1).kind == Tok::Number) {
          advance();
          advance();
          return;
        }
        break;
      default:
        break;
    }
    fail("expected RDF term");
  }

  // String token followed by an optional language tag or datatype.
  void literal_tail() {
    advance();
    if (cur().kind == Tok::LangTag) {
      advance();
    } else if (accept("^^")) {
      iri();
    }
  }

  // ---- expressions (IRIs here are not pattern terms)

  bool at_builtin() const {
    if (cur().kind != Tok::Name) return false;
    auto u = upper(cur().text);
    return builtin_names().count(u) || aggregate_names().count(u) || u == "EXISTS" ||
           (u == "NOT" && is_keyword("EXISTS", 1));
  }

  void constraint() {
    if (is_punct("(")) {
      bracketted_expression();
    } else if (at_builtin()) {
      builtin_call();
    } else if (at_iri()) {
      iri();
      arg_list();
    } else {
      fail("expected constraint");
    }
  }

  void bracketted_expression() {
    expect("(");
    expression();
    expect(")");
  }

  void expression() {
    and_expression();
    while (accept("||")) and_expression();
  }

  void and_expression() {
    relational_expression();
    while (accept("&&")) relational_expression();
  }

  void relational_expression() {
    additive_expression();
    static const char* kOps[] = {"=", "!=", "<", ">", "<=", ">="};
    for (const char* op : kOps) {
      if (accept(op)) {
        additive_expression();
        return;
      }
    }
    if (keyword("IN")) {
      expression_list();
    } else if (is_keyword("NOT") && is_keyword("IN", 1)) {
      advance();
      advance();
      expression_list();
    }
  }

  void expression_list() {
    if (is_nil()) {
      advance();
      advance();
      return;
    }
    expect("(");
    expression();
    while (accept(",")) expression();
    expect(")");
  }

  void additive_expression() {
    multiplicative_expression();
    while (is_punct("+") || is_punct("-")) {
      advance();
      multiplicative_expression();
    }
  }

  void multiplicative_expression() {
    unary_expression();
    while (is_punct("*") || is_punct("/")) {
      advance();
      unary_expression();
    }
  }

  void unary_expression() {
    if (accept("!") || accept("+") || accept("-")) {
      primary();
      return;
    }
    primary();
  }

  void primary() {
    const Token& t = cur();
    if (is_punct("(")) {
      bracketted_expression();
    } else if (t.kind == Tok::Var || t.kind == Tok::Number) {
      advance();
    } else if (t.kind == Tok::String) {
      literal_tail();
    } else if (at_iri()) {
      iri();
      if (is_punct("(")) arg_list();
    } else if (is_keyword("TRUE") || is_keyword("FALSE")) {
      advance();
    } else if (at_builtin()) {
      builtin_call();
    } else {
      fail("expected expression");
    }
  }

  void arg_list() {
    if (is_nil()) {
      advance();
      advance();
      return;
    }
    expect("(");
    keyword("DISTINCT");
    expression();
    while (accept(",")) expression();
    expect(")");
  }

  void builtin_call() {
    std::string name = upper(cur().text);
    advance();
    if (name == "EXISTS") {
      group_graph_pattern();
      return;
    }
    if (name == "NOT") {
      expect_keyword("EXISTS");
      group_graph_pattern();
      return;
    }
    if (aggregate_names().count(name)) {
      expect("(");
      keyword("DISTINCT");
      if (name == "COUNT" && accept("*")) {
        expect(")");
        return;
      }
      expression();
      if (name == "GROUP_CONCAT" && accept(";")) {
        expect_keyword("SEPARATOR");
        expect("=");
        if (cur().kind != Tok::String) fail("expected separator string");
        advance();
      }
      expect(")");
      return;
    }
    if (name == "BNODE" || name == "RAND" || name == "NOW" || name == "UUID" || name == "STRUUID") {
      if (is_nil()) {
        advance();
        advance();
        return;
      }
    }
    expression_list();
  }
};

}  // namespace

ParsedQuery parse_query(std::string_view query, const std::map<std::string, std::string>& fallback_prefixes) {
  Lexer lexer(query);
  Parser parser(lexer.run(), fallback_prefixes);
  return parser.run();
}

}  // namespace ontorag::sparql
