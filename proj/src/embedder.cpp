#include "ontorag/embedder.h"

#include <cctype>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "http_client.h"
#include "ontorag/errors.h"

namespace ontorag {
namespace {

enum class CharClass { Lower, Upper, Digit, Other };

CharClass classify(unsigned char c) {
  if (c >= 0x80) return CharClass::Lower;
  if (std::islower(c)) return CharClass::Lower;
  if (std::isupper(c)) return CharClass::Upper;
  if (std::isdigit(c)) return CharClass::Digit;
  return CharClass::Other;
}

std::uint64_t fnv1a(std::uint64_t seed, std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

LexicalEmbedder::LexicalEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::string LexicalEmbedder::name() const { return "lexical-3gram-" + std::to_string(dimension_); }

std::vector<std::string> LexicalEmbedder::words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    CharClass cls = classify(c);
    if (cls == CharClass::Other) {
      flush();
      continue;
    }
    if (!current.empty()) {
      CharClass prev = classify(static_cast<unsigned char>(text[i - 1]));
      bool boundary = false;
      if (prev == CharClass::Lower && cls == CharClass::Upper) boundary = true;
      if ((prev == CharClass::Digit) != (cls == CharClass::Digit)) boundary = true;
      if (prev == CharClass::Upper && cls == CharClass::Upper && i + 1 < text.size() &&
          classify(static_cast<unsigned char>(text[i + 1])) == CharClass::Lower) {
        boundary = true;
      }
      if (boundary) flush();
    }
    current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
  }
  flush();
  return out;
}

Vector LexicalEmbedder::embed(std::string_view text) const {
  Vector v(dimension_, 0.0);
  for (const auto& word : words(text)) {
    std::string padded = "#" + word + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      v[fnv1a(seed_, std::string_view(padded).substr(i, 3)) % dimension_] += 1.0;
    }
  }
  return v;
}

HttpEmbedder::HttpEmbedder(Options options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw ConfigError("embedding endpoint is not configured");
  const char* key = std::getenv(options_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') throw AuthMissing(options_.api_key_env);
  api_key_ = key;
}

Vector HttpEmbedder::embed(std::string_view text) const {
  nlohmann::json request = {{"model", options_.model}, {"input", std::string(text)}};
  auto result = detail::post_json(detail::join_url(options_.endpoint, "/embeddings"), request.dump(),
                                  {{"Authorization", "Bearer " + api_key_}}, options_.timeout);
  if (result.status != 200) throw HttpError(result.status, result.body);
  try {
    auto body = nlohmann::json::parse(result.body);
    return body.at("data").at(0).at("embedding").get<Vector>();
  } catch (const nlohmann::json::exception& e) {
    throw EmbedderFailure(std::string("malformed embedding response: ") + e.what());
  }
}

}  // namespace ontorag
