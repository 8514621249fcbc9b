#include "ontorag/llm_gateway.h"

#include <openssl/evp.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "http_client.h"
#include "ontorag/errors.h"

namespace ontorag {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Http: return "http";
    case BackendKind::Replay: return "replay";
    case BackendKind::Mock: return "mock";
  }
  return "?";
}

std::optional<BackendKind> parse_backend(std::string_view name) {
  if (name == "http") return BackendKind::Http;
  if (name == "replay") return BackendKind::Replay;
  if (name == "mock") return BackendKind::Mock;
  return std::nullopt;
}

void GenerationConfig::validate() const {
  if (temperature < 0.0) throw ConfigError("temperature must be non-negative");
  if (max_in_flight < 1 || max_in_flight > 64) throw ConfigError("max_in_flight must be between 1 and 64");
  if (backend == BackendKind::Http && endpoint.empty()) throw ConfigError("http backend needs an endpoint URL");
}

std::size_t network_request_count() { return detail::request_count(); }

std::string prompt_key(std::string_view prompt_text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(prompt_text.data(), prompt_text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(length * 2);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

// --- mock -------------------------------------------------------------------

MockBackend::MockBackend(std::string canned_completion)
    : responder_([text = std::move(canned_completion)](const PromptBundle&) { return text; }) {}

MockBackend::MockBackend(Responder responder) : responder_(std::move(responder)) {}

Completion MockBackend::complete(const PromptBundle& bundle) { return Completion{responder_(bundle), 1, {}}; }

// --- replay -----------------------------------------------------------------

ReplayBackend::ReplayBackend(std::map<std::string, std::vector<std::string>> fixtures)
    : fixtures_(std::move(fixtures)) {
  for (const auto& [key, completions] : fixtures_) {
    if (completions.empty()) throw ConfigError("replay fixture " + key + " has no completions");
  }
}

ReplayBackend ReplayBackend::from_file(const std::string& path) { return ReplayBackend(load_fixtures(path)); }

std::map<std::string, std::vector<std::string>> ReplayBackend::load_fixtures(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open replay fixtures " + path);
  std::map<std::string, std::vector<std::string>> fixtures;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto& list = fixtures[j.at("key").get<std::string>()];
      for (const auto& c : j.at("completions")) list.push_back(c.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return fixtures;
}

Completion ReplayBackend::complete(const PromptBundle& bundle) {
  auto key = prompt_key(bundle.text);
  auto it = fixtures_.find(key);
  if (it == fixtures_.end()) throw ReplayMiss(key);
  std::lock_guard lock(mutex_);
  std::size_t& cursor = cursor_[key];
  Completion c{it->second[cursor % it->second.size()], 1, {}};
  ++cursor;
  return c;
}

// --- http -------------------------------------------------------------------

HttpChatBackend::HttpChatBackend(GenerationConfig config)
    : config_(std::move(config)), in_flight_(static_cast<std::ptrdiff_t>(config_.max_in_flight)) {
  config_.validate();
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') throw AuthMissing(config_.api_key_env);
  api_key_ = key;
}

std::string HttpChatBackend::request_once(const std::string& body) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<64>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  auto result = detail::post_json(detail::join_url(config_.endpoint, "/chat/completions"), body,
                                  {{"Authorization", "Bearer " + api_key_}}, config_.timeout);
  if (result.status != 200) throw HttpError(result.status, result.body.substr(0, 200));
  try {
    auto j = nlohmann::json::parse(result.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed chat completion response: ") + e.what());
  }
}

Completion HttpChatBackend::complete(const PromptBundle& bundle) {
  nlohmann::json request = {
      {"model", config_.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", bundle.text}}})},
      {"temperature", config_.temperature},
  };
  if (config_.max_tokens) request["max_tokens"] = *config_.max_tokens;
  const std::string body = request.dump();

  Completion out;
  auto backoff = config_.initial_backoff;
  for (unsigned attempt = 1;; ++attempt) {
    try {
      out.text = request_once(body);
      out.attempt = attempt;
      return out;
    } catch (HttpError& e) {
      bool retryable = e.status() == 429 || e.status() >= 500;
      out.trace.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
      if (!retryable || attempt > config_.max_retries) {
        e.set_trace(out.trace);
        throw;
      }
    } catch (ConfigError&) {
      throw;
    } catch (Error& e) {
      // Timeouts and transport failures.
      out.trace.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
      if (attempt > config_.max_retries) {
        e.set_trace(out.trace);
        throw;
      }
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

// --- extraction -------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::optional<std::size_t> first_keyword(std::string_view text) {
  static constexpr std::string_view kKeywords[] = {"PREFIX", "SELECT", "ASK", "CONSTRUCT", "DESCRIBE"};
  std::optional<std::size_t> best;
  for (auto kw : kKeywords) {
    std::size_t from = 0;
    while (true) {
      auto pos = text.find(kw, from);
      if (pos == std::string_view::npos) break;
      bool left = pos == 0 || !is_word_char(text[pos - 1]);
      bool right = pos + kw.size() >= text.size() || !is_word_char(text[pos + kw.size()]);
      if (left && right) {
        if (!best || pos < *best) best = pos;
        break;
      }
      from = pos + 1;
    }
  }
  return best;
}

std::optional<std::string_view> fenced_interior(std::string_view text) {
  auto open = text.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  std::size_t start = open + 3;
  auto eol = text.find('\n', start);
  auto info = text.substr(start, eol == std::string_view::npos ? std::string_view::npos : eol - start);
  bool info_string = true;
  for (char c : trim(info)) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '_')) info_string = false;
  }
  if (info_string && eol != std::string_view::npos) start = eol + 1;
  auto close = text.find("```", start);
  return text.substr(start, close == std::string_view::npos ? std::string_view::npos : close - start);
}

}  // namespace

std::string extract_sparql(std::string_view completion) {
  std::string_view body = completion;
  if (auto fenced = fenced_interior(completion)) body = *fenced;
  auto kw = first_keyword(body);
  if (!kw) throw NoQueryFound();
  auto query = trim(body.substr(*kw));
  if (query.empty()) throw NoQueryFound();
  return std::string(query);
}

GenerationRecord generate(const PromptBundle& bundle, TextGenerator& backend) {
  GenerationRecord record;
  record.prompt = bundle;
  record.backend = backend.kind();
  auto start = std::chrono::steady_clock::now();
  Completion c = backend.complete(bundle);
  record.latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  record.raw_completion = std::move(c.text);
  record.attempt = c.attempt;
  record.trace = std::move(c.trace);
  try {
    record.extracted_sparql = extract_sparql(record.raw_completion);
  } catch (const NoQueryFound&) {
    record.extracted_sparql.reset();
  }
  return record;
}

}  // namespace ontorag
