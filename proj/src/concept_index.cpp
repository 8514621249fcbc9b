#include "ontorag/concept_index.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "ontorag/errors.h"

namespace ontorag {
namespace {

constexpr std::string_view kIndexFormat = "ontorag-concept-index";
constexpr int kIndexVersion = 1;

double norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::string concept_document(const Concept& c) {
  std::string doc = local_name(c.iri);
  if (c.label && !c.label->empty()) doc += " " + *c.label;
  if (c.comment && !c.comment->empty()) doc += " " + *c.comment;
  return doc;
}

ConceptIndex build_concept_index(const Ontology& ontology, const Embedder& embedder, std::string basis,
                                 unsigned threads) {
  ConceptIndex index;
  index.embedder = embedder.name();
  index.basis = std::move(basis);
  for (const auto& [iri, c] : ontology.concepts) {
    if (c.kind == ConceptKind::AnnotationProperty) continue;
    index.entries.push_back(IndexEntry{iri, concept_document(c), {}});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= index.entries.size()) return;
      try {
        index.entries[i].vector = embedder.embed(index.entries[i].document);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const EmbedderFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw EmbedderFailure(std::string("embedding failed: ") + e.what());
    }
  }

  for (const auto& e : index.entries) {
    if (index.dimension == 0) index.dimension = e.vector.size();
    if (e.vector.size() != index.dimension || e.vector.empty()) {
      throw EmbedderFailure("embedder returned vectors of inconsistent dimension");
    }
  }
  return index;
}

double similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double na = norm(a);
  double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroVector();
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

std::vector<ScoredConcept> rank(const ConceptIndex& index, const Vector& query) {
  if (!index.entries.empty() && query.size() != index.dimension) {
    throw DimensionMismatch(query.size(), index.dimension);
  }
  bool zero_query = norm(query) == 0.0;
  std::vector<ScoredConcept> out;
  out.reserve(index.entries.size());
  for (const auto& e : index.entries) {
    double s = 0.0;
    if (!zero_query && norm(e.vector) != 0.0) s = similarity(query, e.vector);
    out.push_back(ScoredConcept{e.iri, s});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredConcept& x, const ScoredConcept& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.iri < y.iri;
  });
  return out;
}

void save_index(const ConceptIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write index file " + path);
  nlohmann::json header = {{"format", kIndexFormat},
                           {"version", kIndexVersion},
                           {"embedder", index.embedder},
                           {"dimension", index.dimension},
                           {"basis", index.basis},
                           {"entries", index.entries.size()}};
  out << header.dump() << '\n';
  for (const auto& e : index.entries) {
    nlohmann::json line = {{"iri", e.iri.str()}, {"document", e.document}, {"vector", e.vector}};
    out << line.dump() << '\n';
  }
  if (!out) throw ConfigError("failed writing index file " + path);
}

ConceptIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open index file " + path);
  ConceptIndex index;
  std::string line;
  std::size_t line_no = 0;
  try {
    if (!std::getline(in, line)) throw ConfigError("index file " + path + " is empty");
    ++line_no;
    auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != kIndexFormat) throw ConfigError(path + " is not a concept index file");
    if (header.value("version", 0) != kIndexVersion) {
      throw ConfigError("unsupported index version in " + path);
    }
    index.embedder = header.value("embedder", "");
    index.dimension = header.value("dimension", std::size_t{0});
    index.basis = header.value("basis", "full");
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      IndexEntry e{Iri(j.at("iri").get<std::string>()), j.at("document").get<std::string>(),
                   j.at("vector").get<Vector>()};
      if (e.vector.size() != index.dimension) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": vector dimension does not match header");
      }
      index.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
  }
  std::sort(index.entries.begin(), index.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.iri < b.iri; });
  return index;
}

void check_index_against(const ConceptIndex& index, const Ontology& ontology) {
  auto vocab = vocabulary(ontology);
  for (const auto& e : index.entries) {
    if (!vocab.count(e.iri)) {
      throw ConfigError("index entry " + e.iri.str() + " is not part of the ontology; rebuild the index");
    }
  }
}

}  // namespace ontorag
