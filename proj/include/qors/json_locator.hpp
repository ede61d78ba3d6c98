#pragma once

// JSON parsing that remembers the source line of every value.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace qors {

struct LocatedJson {
  nlohmann::json value;
  // JSON pointer -> 1-based line where the value (or its key) starts.
  std::map<std::string, std::size_t> lines;

  // Line of `pointer`, falling back to the nearest located ancestor.
  std::size_t line_of(const std::string& pointer) const;
};

// Throws ConfigError carrying `file` and the offending line on syntax errors.
LocatedJson parse_located(std::string_view text, const std::string& file);

// "/a/b" + "c~d" -> "/a/b/c~0d"
std::string pointer_child(const std::string& parent, std::string_view token);
std::string pointer_child(const std::string& parent, std::size_t index);

}  // namespace qors
