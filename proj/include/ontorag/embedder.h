#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ontorag {

using Vector = std::vector<double>;

// Text embedding capability.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Vector embed(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

// Hashed character 3-gram term frequencies. Text is split into words on
// non-alphanumeric characters and camelCase / letter-digit boundaries,
// lower-cased, and padded as "#word#" before the 3-grams are taken.
// Deterministic and offline.
class LexicalEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDimension = 512;
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'0f'0a'7a'11ULL;

  explicit LexicalEmbedder(std::size_t dimension = kDefaultDimension, std::uint64_t seed = kDefaultSeed);

  Vector embed(std::string_view text) const override;
  std::string name() const override;
  std::size_t dimension() const { return dimension_; }

  // Word segmentation used before 3-gram extraction.
  static std::vector<std::string> words(std::string_view text);

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// OpenAI-compatible /embeddings endpoint. The API key is read from the
// named environment variable at construction.
class HttpEmbedder final : public Embedder {
 public:
  struct Options {
    std::string endpoint;  // base URL, e.g. https://host/v1
    std::string model;
    std::string api_key_env = "ONTORAG_API_KEY";
    std::chrono::milliseconds timeout{30000};
  };

  explicit HttpEmbedder(Options options);

  Vector embed(std::string_view text) const override;
  std::string name() const override { return "http:" + options_.model; }

 private:
  Options options_;
  std::string api_key_;
};

}  // namespace ontorag
