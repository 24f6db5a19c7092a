#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pdgfix/fgpdg.hpp"
#include "pdgfix/syntax.hpp"
#include "pdgfix/treediff.hpp"

namespace pdgfix {

/// Per-data-vertex rule governing label comparison during isomorphism
/// search.
struct MatchingMode {
  enum Variant : uint8_t {
    MatchOriginalLabels,
    MatchAnyLabel,
    MatchLongestCommonSuffix,
  } variant = MatchOriginalLabels;
  std::string suffix; // nonempty iff variant is the suffix mode

  friend bool operator==(const MatchingMode &a, const MatchingMode &b) {
    return a.variant == b.variant && a.suffix == b.suffix;
  }
};

const char *matching_mode_name(MatchingMode::Variant variant);

/// One before/after example of a recurring change; both fragments are
/// complete functions.
struct PatternInstance {
  std::string before_source;
  std::string after_source;
  std::shared_ptr<SyntaxTree> before_tree;
  std::shared_ptr<SyntaxTree> after_tree;
  Pdg before_pdg;
};

PatternInstance make_instance(std::string before_source,
                              std::string after_source);

/// A compiled change pattern: the extended before-graph, per-data-vertex
/// matching modes, the generalized edit script over the canonical instance,
/// and metadata.
struct PatternBundle {
  static constexpr int kSchemaVersion = 1;

  std::string id;
  std::string description;
  int schema_version = kSchemaVersion;
  std::string canonical_source;
  std::shared_ptr<SyntaxTree> canonical_tree;
  Pdg graph; // extended; graph.tree points at canonical_tree
  std::map<int, MatchingMode> modes;
  std::vector<EditAction> script;
  std::map<std::string, int> bound_names; // placeholder -> data vertex id
};

} // namespace pdgfix
