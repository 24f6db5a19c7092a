#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pdgfix/syntax.hpp"

namespace pdgfix {

/// Injective node correspondence between two trees; mapped pairs have equal
/// kinds.
class NodeMapping {
public:
  void link(NodeId before, NodeId after) {
    src_to_dst_[before] = after;
    dst_to_src_[after] = before;
  }
  bool has_src(NodeId before) const { return src_to_dst_.count(before) > 0; }
  bool has_dst(NodeId after) const { return dst_to_src_.count(after) > 0; }
  NodeId dst_of(NodeId before) const {
    auto it = src_to_dst_.find(before);
    return it == src_to_dst_.end() ? kNoNode : it->second;
  }
  NodeId src_of(NodeId after) const {
    auto it = dst_to_src_.find(after);
    return it == dst_to_src_.end() ? kNoNode : it->second;
  }
  size_t size() const { return src_to_dst_.size(); }
  const std::unordered_map<NodeId, NodeId> &pairs() const {
    return src_to_dst_;
  }

private:
  std::unordered_map<NodeId, NodeId> src_to_dst_;
  std::unordered_map<NodeId, NodeId> dst_to_src_;
};

enum class EditOp : uint8_t { Insert, Delete, Update, Move };

const char *edit_op_name(EditOp op);

/// Reference to a node of the tree being edited: either a node that existed
/// before the script ran, or the node created by an earlier insert action.
struct NodeRef {
  enum RefKind : uint8_t { Existing, Inserted } ref = Existing;
  NodeId node = kNoNode; // Existing
  int action = -1;       // Inserted: index of the creating action

  static NodeRef existing(NodeId id) { return {Existing, id, -1}; }
  static NodeRef inserted(int action) { return {Inserted, kNoNode, action}; }
  friend bool operator==(const NodeRef &a, const NodeRef &b) {
    return a.ref == b.ref && a.node == b.node && a.action == b.action;
  }
};

/// One atomic tree operation. Exactly the fields relevant to `op` are used.
struct EditAction {
  EditOp op = EditOp::Update;
  NodeRef target;                  // delete / update / move
  NodeKind new_kind = NodeKind::Name; // insert: kind of the fresh node
  std::string label;               // insert: fresh label; update: new label
  std::string placeholder;         // nonempty: label rebinds per match
  NodeRef parent;                  // insert / move
  int position = -1;               // insert / move
};

/// GumTree-style matching: top-down isomorphic subtrees of height >= 2, then
/// bottom-up container pairing by mapped-descendant dice >= 0.5 with recovery
/// alignment inside newly paired containers.
NodeMapping match_trees(const SyntaxTree &before, const SyntaxTree &after);

/// Chawathe-ordered script (updates/inserts/moves top-down, deletes
/// bottom-up) such that applying it to `before` yields a tree structurally
/// equal to `after`.
std::vector<EditAction> compute_edit_script(const SyntaxTree &before,
                                            const SyntaxTree &after,
                                            const NodeMapping &mapping);

struct ApplyResult {
  SyntaxTree tree;
  std::set<NodeId> touched;
  std::vector<NodeId> inserted; // node created by each action (or kNoNode)
};

/// Applies actions strictly in order to a copy of `tree`. Throws
/// DanglingReference with the failing action index; the input is never
/// modified (application is transactional).
ApplyResult apply_edit_script(const SyntaxTree &tree,
                              const std::vector<EditAction> &script);

} // namespace pdgfix
