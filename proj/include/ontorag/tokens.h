#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

namespace ontorag {

// ceil(byte_length / 4).
constexpr std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

// Swappable estimator, e.g. for an exact model tokenizer.
using TokenEstimator = std::function<std::size_t(std::string_view)>;

inline TokenEstimator default_token_estimator() {
  return [](std::string_view text) { return estimate_tokens(text); };
}

}  // namespace ontorag
