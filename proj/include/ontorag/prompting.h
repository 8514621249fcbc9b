#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ontorag/representation.h"
#include "ontorag/selection.h"
#include "ontorag/tokens.h"

namespace ontorag {

enum class PromptMode { Simple, Example, Domain };

std::string_view to_string(PromptMode mode);  // "simple", "example", "domain"
std::optional<PromptMode> parse_mode(std::string_view name);

// Template texts. {question} and {ontology} are filled in the simple block,
// {query} in the two example blocks. Blocks are joined by a blank line.
struct PromptTemplates {
  std::string simple =
      "Write a SPARQL query to answer the following question: {question}. "
      "Use the following ontology as schema for your query: {ontology}";
  std::string example =
      "Task: Generate a SPARQL SELECT statement for querying a graph database. "
      "For instance, to find all machines of a given plant, the following query would be suitable: {query}";
  std::string domain =
      "EXAMPLE 2: For instance, to find all Materials, i.e., their numbers, that are used on Line Y in Plant X: "
      "{query}";
  std::string separator = "\n\n";

  // JSON object with any of the keys simple, example, domain, separator.
  static PromptTemplates load(const std::string& path);
};

struct PromptBundle {
  std::string text;
  PromptMode mode = PromptMode::Simple;
  SelectionVariant variant = SelectionVariant::OntA;
  Format format = Format::Graph;
  std::size_t token_estimate = 0;
  std::string question;
};

// Throws MissingExample when the mode needs an example that is absent.
PromptBundle build_prompt(std::string_view question, const RenderedContext& context, PromptMode mode,
                          const std::optional<std::string>& generic_example,
                          const std::optional<std::string>& domain_example,
                          const PromptTemplates& templates = {});

// Returns the bundle when it fits; throws BudgetExceeded otherwise.
const PromptBundle& enforce_budget(const PromptBundle& bundle, std::size_t budget);

}  // namespace ontorag
