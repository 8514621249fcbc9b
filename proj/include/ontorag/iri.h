#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace ontorag {

// Absolute IRI. Construction does not validate; use is_valid() where the
// input is untrusted.
class Iri {
 public:
  Iri() = default;
  explicit Iri(std::string value) : value_(std::move(value)) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  // Non-empty and carries a scheme ("http:", "urn:", ...).
  bool is_valid() const;

  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

// Text after the last '#', else after the last '/', else after the last ':'.
// Trailing separators are ignored.
// Repeats until the result carries none of those separators, so that
// local_name(local_name(x)) == local_name(x).
std::string local_name(std::string_view iri);
inline std::string local_name(const Iri& iri) { return local_name(iri.str()); }

// Resolves a possibly relative IRI reference against a base IRI.
std::string resolve_iri(const std::string& base, const std::string& ref);

namespace vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline Iri rdf(std::string_view local) { return Iri(std::string(kRdf) + std::string(local)); }
inline Iri rdfs(std::string_view local) { return Iri(std::string(kRdfs) + std::string(local)); }
inline Iri owl(std::string_view local) { return Iri(std::string(kOwl) + std::string(local)); }
inline Iri xsd(std::string_view local) { return Iri(std::string(kXsd) + std::string(local)); }

// True for IRIs in the rdf, rdfs, owl or xsd namespaces.
bool is_standard(const Iri& iri);

}  // namespace vocab
}  // namespace ontorag

template <>
struct std::hash<ontorag::Iri> {
  std::size_t operator()(const ontorag::Iri& iri) const noexcept {
    return std::hash<std::string>{}(iri.str());
  }
};
