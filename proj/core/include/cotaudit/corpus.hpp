#pragma once

#include <filesystem>
#include <vector>

#include "cotaudit/trace.hpp"

namespace cotaudit {

/// Reads a JSONL corpus of {"id", "text", "category"} objects. Throws
/// ConfigError naming the line on parse errors, blank text or duplicate ids.
std::vector<Query> load_corpus(const std::filesystem::path& path);

/// Throws ConfigError on duplicate ids or invalid queries.
void validate_corpus(const std::vector<Query>& corpus);

}  // namespace cotaudit
