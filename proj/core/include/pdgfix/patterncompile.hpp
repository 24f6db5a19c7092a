#pragma once

#include <string>
#include <vector>

#include "pdgfix/pattern.hpp"

namespace pdgfix {

/// Names matched exactly by default: Python builtins, common stdlib dotted
/// names, plus any extra entries registered by the caller.
class BuiltinRegistry {
public:
  static const BuiltinRegistry &standard();
  BuiltinRegistry() = default;
  explicit BuiltinRegistry(std::vector<std::string> extra);
  bool contains(const std::string &name) const;

private:
  std::vector<std::string> extra_;
};

/// Kind- and edge-preserving mapping of the canonical before-graph into each
/// other instance's graph, maximizing exact label agreement. Entry k of the
/// result corresponds to instances[k + 1]; instance 0 is canonical. An
/// instance with no full mapping raises AlignmentFailure.
std::vector<std::map<int, int>>
align_instances(const std::vector<PatternInstance> &instances);

/// Per data vertex of the canonical graph, the mode implied by its label
/// multiset across instances (see MatchingMode). Operation and control
/// vertices always match by exact label and kind and get no entry.
std::map<int, MatchingMode>
assign_matching_modes(const Pdg &canonical,
                      const std::vector<PatternInstance> &instances,
                      const std::vector<std::map<int, int>> &alignments,
                      const BuiltinRegistry &registry);

/// Signature used to compare edit actions across instances: op, node kind,
/// generalized label, parent node kind, position role.
struct ActionSignature {
  std::string text;
  friend bool operator==(const ActionSignature &a, const ActionSignature &b) {
    return a.text == b.text;
  }
};

/// Folds the instance scripts pairwise with a longest common subsequence
/// under generalized-identifier equality; the result is expressed with
/// canonical-instance references. Raises EmptyCore when the fold empties.
std::vector<EditAction>
generalized_lcs(const std::vector<std::vector<EditAction>> &scripts,
                const std::vector<std::vector<ActionSignature>> &signatures);

/// Adds anchor vertices for script references to syntax nodes outside the
/// graph; existing vertices are untouched.
Pdg extend_graph(const Pdg &canonical, const SyntaxTree &tree,
                 const std::vector<EditAction> &script);

/// Full compilation pipeline: align, assign modes, per-instance tree diff,
/// generalized LCS, graph extension, bundle validation (including the
/// self-match check).
PatternBundle compile_pattern(const std::vector<PatternInstance> &instances,
                              const std::string &id,
                              const std::string &description,
                              const BuiltinRegistry &registry =
                                  BuiltinRegistry::standard());

} // namespace pdgfix
