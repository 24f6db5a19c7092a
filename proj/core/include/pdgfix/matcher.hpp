#pragma once

#include <map>
#include <string>
#include <vector>

#include "pdgfix/pattern.hpp"

namespace pdgfix {

/// One occurrence of a pattern graph inside a target graph. Anchor vertices
/// are resolved syntactically at fix time and do not appear in the mapping.
struct Isomorphism {
  std::map<int, int> vertex_map; // pattern vertex -> target vertex
  std::map<int, int> edge_map;   // pattern edge index -> target edge index
  std::map<std::string, std::string> binding; // placeholder -> target label
};

struct Finding {
  std::string pattern_id;
  std::string file;
  Isomorphism iso;
  std::vector<Span> spans; // merged, sorted highlight spans
  std::string message;
  bool fixable = false;
};

/// Mode semantics: any -> true; suffix(s) -> target ends with s;
/// original -> exact equality.
bool label_compatible(const MatchingMode &mode, const std::string &pattern_label,
                      const std::string &target_label);

struct MatchResult {
  std::vector<Isomorphism> matches;
  bool budget_exceeded = false; // reported as a skipped check, not a crash
};

/// All matches of the bundle's before-graph in `target` via backtracking
/// subgraph isomorphism honoring matching modes. Deduplicated on equal
/// target-vertex sets (lexicographically smallest mapping wins) and sorted
/// by smallest mapped span start. The search stops after `budget` candidate
/// expansions.
MatchResult find_matches(const PatternBundle &bundle, const Pdg &target,
                         long budget = 100000);

} // namespace pdgfix
