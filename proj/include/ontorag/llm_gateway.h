#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "ontorag/prompting.h"

namespace ontorag {

enum class BackendKind { Http, Replay, Mock };

std::string_view to_string(BackendKind kind);  // "http", "replay", "mock"
std::optional<BackendKind> parse_backend(std::string_view name);

struct GenerationConfig {
  BackendKind backend = BackendKind::Mock;
  std::string model_name = "gpt-4";
  std::string endpoint;  // base URL of an OpenAI-compatible API (Http only)
  std::string api_key_env = "ONTORAG_API_KEY";
  double temperature = 0.0;
  std::chrono::milliseconds timeout{60000};
  unsigned max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  unsigned max_in_flight = 4;
  std::optional<int> max_tokens;

  void validate() const;  // throws ConfigError
};

struct Completion {
  std::string text;
  unsigned attempt = 1;             // 1-based attempt that succeeded
  std::vector<std::string> trace;   // one line per failed attempt
};

// A text-generation backend. Implementations are safe for concurrent calls.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual Completion complete(const PromptBundle& bundle) = 0;
  virtual BackendKind kind() const = 0;
};

class MockBackend final : public TextGenerator {
 public:
  using Responder = std::function<std::string(const PromptBundle&)>;

  explicit MockBackend(std::string canned_completion);
  explicit MockBackend(Responder responder);

  Completion complete(const PromptBundle& bundle) override;
  BackendKind kind() const override { return BackendKind::Mock; }

 private:
  Responder responder_;
};

// Completions looked up by prompt_key(prompt text). Each key holds an
// ordered list that successive calls consume round-robin.
class ReplayBackend final : public TextGenerator {
 public:
  explicit ReplayBackend(std::map<std::string, std::vector<std::string>> fixtures);

  // Line-delimited JSON records {"key": ..., "completions": [...]}.
  static ReplayBackend from_file(const std::string& path);
  static std::map<std::string, std::vector<std::string>> load_fixtures(const std::string& path);

  Completion complete(const PromptBundle& bundle) override;  // throws ReplayMiss
  BackendKind kind() const override { return BackendKind::Replay; }
  bool has(const std::string& key) const { return fixtures_.count(key) != 0; }

 private:
  std::map<std::string, std::vector<std::string>> fixtures_;
  std::map<std::string, std::size_t> cursor_;
  std::mutex mutex_;
};

// OpenAI-compatible POST {endpoint}/chat/completions with exponential
// backoff on timeouts, transport errors, 429 and 5xx.
class HttpChatBackend final : public TextGenerator {
 public:
  explicit HttpChatBackend(GenerationConfig config);  // throws AuthMissing

  Completion complete(const PromptBundle& bundle) override;
  BackendKind kind() const override { return BackendKind::Http; }

 private:
  std::string request_once(const std::string& body);

  GenerationConfig config_;
  std::string api_key_;
  std::counting_semaphore<64> in_flight_;
};

struct GenerationRecord {
  PromptBundle prompt;
  std::string raw_completion;
  std::optional<std::string> extracted_sparql;
  std::chrono::milliseconds latency{0};
  BackendKind backend = BackendKind::Mock;
  unsigned attempt = 1;
  std::vector<std::string> trace;
};

// Hex SHA-256 of the prompt text; the replay fixture key.
std::string prompt_key(std::string_view prompt_text);

// Runs one round trip and extracts the query (left empty when the
// completion holds none).
GenerationRecord generate(const PromptBundle& bundle, TextGenerator& backend);

// Interior of the first fenced code block, else the text from the first
// PREFIX/SELECT/ASK/CONSTRUCT/DESCRIBE keyword on; trimmed. Throws
// NoQueryFound.
std::string extract_sparql(std::string_view completion);

// Number of HTTP requests issued by this process.
std::size_t network_request_count();

}  // namespace ontorag
