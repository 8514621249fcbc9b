#include "ontorag/iri.h"

#include <cctype>

namespace ontorag {

bool Iri::is_valid() const {
  auto colon = value_.find(':');
  if (colon == std::string::npos || colon == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(value_[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = value_[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

namespace {

std::string_view strip_once(std::string_view text) {
  for (char sep : {'#', '/', ':'}) {
    auto pos = text.rfind(sep);
    if (pos == std::string_view::npos) continue;
    auto tail = text.substr(pos + 1);
    if (!tail.empty()) return tail;
  }
  return text;
}

}  // namespace

std::string local_name(std::string_view iri) {
  std::string_view current = iri;
  // Namespace IRIs such as "http://ex.org/onto#" name their last segment.
  while (current.size() > 1 && (current.back() == '#' || current.back() == '/' || current.back() == ':')) {
    current.remove_suffix(1);
  }
  while (true) {
    auto next = strip_once(current);
    if (next.size() == current.size()) return std::string(current);
    current = next;
  }
}

// Minimal RFC 3986 reference resolution, sufficient for ontology documents.
std::string resolve_iri(const std::string& base, const std::string& ref) {
  Iri candidate(ref);
  if (candidate.is_valid() || base.empty()) return ref;
  if (ref.empty()) {
    auto hash = base.find('#');
    return hash == std::string::npos ? base : base.substr(0, hash);
  }
  if (ref[0] == '#') {
    auto hash = base.find('#');
    return (hash == std::string::npos ? base : base.substr(0, hash)) + ref;
  }
  auto scheme_end = base.find(':');
  if (ref.rfind("//", 0) == 0) return base.substr(0, scheme_end + 1) + ref;
  std::size_t authority_end = scheme_end + 1;
  if (base.compare(scheme_end + 1, 2, "//") == 0) {
    authority_end = base.find('/', scheme_end + 3);
    if (authority_end == std::string::npos) authority_end = base.size();
  }
  if (ref[0] == '/') return base.substr(0, authority_end) + ref;
  std::string dir = base.substr(0, base.find_first_of("?#"));
  auto slash = dir.rfind('/');
  if (slash == std::string::npos || slash < authority_end) {
    dir = base.substr(0, authority_end) + "/";
  } else {
    dir = dir.substr(0, slash + 1);
  }
  return dir + ref;
}

namespace vocab {

bool is_standard(const Iri& iri) {
  const auto& s = iri.str();
  for (auto ns : {kRdf, kRdfs, kOwl, kXsd}) {
    if (s.size() > ns.size() && s.compare(0, ns.size(), ns) == 0) return true;
  }
  return false;
}

}  // namespace vocab
}  // namespace ontorag
