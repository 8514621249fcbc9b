// Loopback-only: a local httplib server stands in for the chat and
// embedding endpoints. Tests skip when the sandbox forbids binding.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <nlohmann/json.hpp>

#include "ontorag/embedder.h"
#include "ontorag/errors.h"
#include "ontorag/llm_gateway.h"

using namespace ontorag;
using namespace std::chrono_literals;

namespace {

constexpr const char* kKeyEnv = "ONTORAG_LOOPBACK_TEST_KEY";

std::string chat_reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

class LoopbackServer : public ::testing::Test {
 protected:
  void SetUp() override {
    ::setenv(kKeyEnv, "secret-token", 1);
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) GTEST_SKIP() << "cannot bind a loopback port";
  }

  void start() {
    thread_ = std::jthread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    ::unsetenv(kKeyEnv);
  }

  GenerationConfig config() const {
    GenerationConfig c;
    c.backend = BackendKind::Http;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    c.api_key_env = kKeyEnv;
    c.model_name = "test-model";
    c.timeout = 2000ms;
    c.initial_backoff = 1ms;
    c.max_retries = 2;
    return c;
  }

  static PromptBundle prompt(const std::string& text) {
    PromptBundle b;
    b.text = text;
    return b;
  }

  httplib::Server server_;
  int port_ = 0;
  std::jthread thread_;
};

}  // namespace

TEST_F(LoopbackServer, ChatCompletionRequestShapeAndExtraction) {
  nlohmann::json seen;
  std::string auth;
  server_.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(chat_reply("Here you go:\n```sparql\nSELECT ?x WHERE { ?x a <http://e/P> }\n```"),
                    "application/json");
  });
  start();
  auto cfg = config();
  cfg.max_tokens = 256;
  HttpChatBackend backend(cfg);
  std::size_t before = network_request_count();
  auto record = generate(prompt("the prompt"), backend);
  EXPECT_EQ(network_request_count(), before + 1);
  EXPECT_EQ(record.extracted_sparql, "SELECT ?x WHERE { ?x a <http://e/P> }");
  EXPECT_EQ(record.backend, BackendKind::Http);
  EXPECT_EQ(record.attempt, 1u);
  EXPECT_EQ(auth, "Bearer secret-token");
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["max_tokens"], 256);
  EXPECT_EQ(seen["messages"][0]["role"], "user");
  EXPECT_EQ(seen["messages"][0]["content"], "the prompt");
}

TEST_F(LoopbackServer, RetriesRateLimitsAndServerErrors) {
  std::atomic<int> calls{0};
  server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    int n = ++calls;
    if (n == 1) {
      res.status = 429;
    } else if (n == 2) {
      res.status = 503;
    } else {
      res.set_content(chat_reply("ASK { ?s ?p ?o }"), "application/json");
    }
  });
  start();
  HttpChatBackend backend(config());
  auto record = generate(prompt("p"), backend);
  EXPECT_EQ(record.attempt, 3u);
  EXPECT_EQ(record.trace.size(), 2u);
  EXPECT_EQ(record.extracted_sparql, "ASK { ?s ?p ?o }");
}

TEST_F(LoopbackServer, GivesUpAfterMaxRetriesWithTrace) {
  std::atomic<int> calls{0};
  server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  start();
  HttpChatBackend backend(config());
  try {
    backend.complete(prompt("p"));
    FAIL();
  } catch (const HttpError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.trace().size(), 3u);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST_F(LoopbackServer, ClientErrorsAreNotRetried) {
  std::atomic<int> calls{0};
  server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
    res.set_content("{\"error\":\"bad key\"}", "application/json");
  });
  start();
  HttpChatBackend backend(config());
  EXPECT_THROW(backend.complete(prompt("p")), HttpError);
  EXPECT_EQ(calls.load(), 1);
}

TEST_F(LoopbackServer, TimeoutIsRetriedThenRaised) {
  std::atomic<int> calls{0};
  server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    std::this_thread::sleep_for(400ms);
    res.set_content(chat_reply("SELECT * {}"), "application/json");
  });
  start();
  auto cfg = config();
  cfg.timeout = 100ms;
  cfg.max_retries = 1;
  HttpChatBackend backend(cfg);
  EXPECT_THROW(backend.complete(prompt("p")), TimeoutError);
  EXPECT_EQ(calls.load(), 2);
}

TEST_F(LoopbackServer, MalformedResponse) {
  server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  start();
  auto cfg = config();
  cfg.max_retries = 0;
  HttpChatBackend backend(cfg);
  EXPECT_THROW(backend.complete(prompt("p")), Error);
}

TEST_F(LoopbackServer, BoundsRequestsInFlight) {
  std::atomic<int> active{0}, peak{0};
  server_.new_task_queue = [] { return new httplib::ThreadPool(16); };
  server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    int now = ++active;
    int expected = peak.load();
    while (now > expected && !peak.compare_exchange_weak(expected, now)) {
    }
    std::this_thread::sleep_for(30ms);
    --active;
    res.set_content(chat_reply("SELECT * {}"), "application/json");
  });
  start();
  auto cfg = config();
  cfg.max_in_flight = 2;
  HttpChatBackend backend(cfg);
  {
    std::vector<std::jthread> clients;
    for (int i = 0; i < 8; ++i) clients.emplace_back([&] { backend.complete(prompt("p")); });
  }
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST_F(LoopbackServer, EmbeddingEndpoint) {
  nlohmann::json seen;
  server_.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(R"({"data": [{"embedding": [0.5, -1.0, 2.0]}]})", "application/json");
  });
  start();
  HttpEmbedder embedder({"http://127.0.0.1:" + std::to_string(port_) + "/v1", "emb-model", kKeyEnv, 2000ms});
  EXPECT_EQ(embedder.embed("Plant"), (Vector{0.5, -1.0, 2.0}));
  EXPECT_EQ(seen["input"], "Plant");
  EXPECT_EQ(seen["model"], "emb-model");
  EXPECT_EQ(embedder.name(), "http:emb-model");
}

TEST_F(LoopbackServer, EmbeddingErrors) {
  server_.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("fail") != std::string::npos) {
      res.status = 500;
    } else {
      res.set_content(R"({"data": []})", "application/json");
    }
  });
  start();
  HttpEmbedder embedder({"http://127.0.0.1:" + std::to_string(port_) + "/v1", "m", kKeyEnv, 2000ms});
  EXPECT_THROW(embedder.embed("fail"), HttpError);
  EXPECT_THROW(embedder.embed("ok"), EmbedderFailure);
}
