#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pdgfix/pattern.hpp"

namespace pdgfix {

/// One self-contained JSON document per bundle (extension `.pattern.json`).
void save_bundle(const PatternBundle &bundle, const std::filesystem::path &path);

PatternBundle load_bundle(const std::filesystem::path &path);

/// Parse/serialize helpers shared with tests.
std::string bundle_to_json(const PatternBundle &bundle);
PatternBundle bundle_from_json(const std::string &json_text);

struct PatternSetDiagnostic {
  std::filesystem::path file;
  std::string message;
};

/// Loads every `*.pattern.json` in the directory, sorted by pattern id.
/// Malformed bundles are reported and skipped unless `strict`, which
/// rethrows. Duplicate ids raise DuplicateId either way.
std::vector<PatternBundle>
load_pattern_set(const std::filesystem::path &directory, bool strict = false,
                 std::vector<PatternSetDiagnostic> *diagnostics = nullptr);

} // namespace pdgfix
