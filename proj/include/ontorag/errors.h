#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ontorag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;

  // Earlier failed attempts, for errors raised after retries.
  const std::vector<std::string>& trace() const { return trace_; }
  void set_trace(std::vector<std::string> trace) { trace_ = std::move(trace); }

 private:
  std::vector<std::string> trace_;
};

// Malformed Turtle input.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Malformed SPARQL input. Position is a byte offset into the query text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("offset " + std::to_string(position) + ": " + message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EmbedderFailure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("cosine similarity of a zero vector") {}
};

class EmptyIndex : public Error {
 public:
  EmptyIndex() : Error("concept index is empty") {}
};

class MissingExample : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t estimate, std::size_t budget)
      : Error("prompt needs " + std::to_string(estimate) + " tokens, budget is " +
              std::to_string(budget) + " (overshoot " + std::to_string(estimate - budget) + ")"),
        estimate_(estimate),
        budget_(budget) {}
  std::size_t estimate() const { return estimate_; }
  std::size_t budget() const { return budget_; }
  std::size_t overshoot() const { return estimate_ - budget_; }

 private:
  std::size_t estimate_;
  std::size_t budget_;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& body)
      : Error("HTTP " + std::to_string(status) + (body.empty() ? "" : ": " + body)), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class ReplayMiss : public Error {
 public:
  explicit ReplayMiss(const std::string& key) : Error("no replay fixture for key " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class AuthMissing : public Error {
 public:
  explicit AuthMissing(const std::string& env_var)
      : Error("API key environment variable " + env_var + " is not set") {}
};

class NoQueryFound : public Error {
 public:
  NoQueryFound() : Error("completion contains no SPARQL query") {}
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class UnequalRaterCounts : public Error {
 public:
  using Error::Error;
};

class DegenerateAgreement : public Error {
 public:
  using Error::Error;
};

// Bad configuration, missing files, unknown enum names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ontorag
