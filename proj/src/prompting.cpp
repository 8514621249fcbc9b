#include "ontorag/prompting.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ontorag/errors.h"
#include "ontorag/text_template.h"

namespace ontorag {

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::Simple: return "simple";
    case PromptMode::Example: return "example";
    case PromptMode::Domain: return "domain";
  }
  return "?";
}

std::optional<PromptMode> parse_mode(std::string_view name) {
  if (name == "simple") return PromptMode::Simple;
  if (name == "example") return PromptMode::Example;
  if (name == "domain") return PromptMode::Domain;
  return std::nullopt;
}

PromptTemplates PromptTemplates::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open templates file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  PromptTemplates t;
  try {
    auto doc = nlohmann::json::parse(buf.str());
    if (!doc.is_object()) throw ConfigError("templates file " + path + " must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key != "simple" && key != "example" && key != "domain" && key != "separator") {
        throw ConfigError("unknown key '" + key + "' in templates file " + path);
      }
    }
    t.simple = doc.value("simple", t.simple);
    t.example = doc.value("example", t.example);
    t.domain = doc.value("domain", t.domain);
    t.separator = doc.value("separator", t.separator);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed templates file " + path + ": " + e.what());
  }
  return t;
}

PromptBundle build_prompt(std::string_view question, const RenderedContext& context, PromptMode mode,
                          const std::optional<std::string>& generic_example,
                          const std::optional<std::string>& domain_example, const PromptTemplates& templates) {
  if (mode != PromptMode::Simple && !generic_example) {
    throw MissingExample(std::string(to_string(mode)) + " prompt needs a generic example query");
  }
  if (mode == PromptMode::Domain && !domain_example) {
    throw MissingExample("domain prompt needs a domain-specific example query");
  }
  std::string text =
      fill_template(templates.simple, {{"question", std::string(question)}, {"ontology", context.text}});
  if (mode != PromptMode::Simple) {
    text += templates.separator + fill_template(templates.example, {{"query", *generic_example}});
  }
  if (mode == PromptMode::Domain) {
    text += templates.separator + fill_template(templates.domain, {{"query", *domain_example}});
  }

  PromptBundle bundle;
  bundle.token_estimate = estimate_tokens(text);
  bundle.text = std::move(text);
  bundle.mode = mode;
  bundle.format = context.format;
  bundle.question = std::string(question);
  return bundle;
}

const PromptBundle& enforce_budget(const PromptBundle& bundle, std::size_t budget) {
  if (bundle.token_estimate > budget) throw BudgetExceeded(bundle.token_estimate, budget);
  return bundle;
}

}  // namespace ontorag
