#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ontorag {

// Placeholders are "{name}" with name in [a-z_]+; any other brace is
// literal text. Substitution is single-pass: inserted values are never
// rescanned. Unknown placeholders are left verbatim.
std::string fill_template(std::string_view text, const std::map<std::string, std::string>& values);

// Placeholder names in order of appearance.
std::vector<std::string> placeholders(std::string_view text);

}  // namespace ontorag
