#include "ontorag/text_template.h"

namespace ontorag {
namespace {

// Length of the placeholder starting at text[pos] == '{', or 0.
std::size_t placeholder_length(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;
  while (i < text.size() && ((text[i] >= 'a' && text[i] <= 'z') || text[i] == '_')) ++i;
  if (i == pos + 1 || i >= text.size() || text[i] != '}') return 0;
  return i - pos + 1;
}

}  // namespace

std::string fill_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '{') {
      if (auto len = placeholder_length(text, i)) {
        auto it = values.find(std::string(text.substr(i + 1, len - 2)));
        if (it != values.end()) {
          out += it->second;
          i += len;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    if (auto len = placeholder_length(text, i)) {
      out.emplace_back(text.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return out;
}

}  // namespace ontorag
