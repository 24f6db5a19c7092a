#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pdgfix/syntax.hpp"

namespace pdgfix {

enum class PdgKind : uint8_t { Data, Operation, Control };

enum class PdgSubkind : uint8_t {
  // data
  Variable,
  LiteralValue,
  FunctionRef,
  // operation
  CallOp,
  AssignOp,
  AugAssignOp,
  BinaryOp,
  CompareOp,
  SubscriptLoad,
  SubscriptStore,
  AttributeLoad,
  // control
  ForCtrl,
  WhileCtrl,
  IfCtrl,
  WithCtrl,
  TryCtrl,
};

enum class PdgEdgeKind : uint8_t { Control, Data };

enum class PdgEdgeLabel : uint8_t {
  Def,
  Use,
  Recv,
  Para,
  Qual,
  Dep,
  TrueBranch,
  FalseBranch,
  Anchor,
};

const char *pdg_kind_name(PdgKind kind);
const char *pdg_subkind_name(PdgSubkind subkind);
const char *pdg_edge_label_name(PdgEdgeLabel label);

struct PdgNode {
  int id = -1;
  PdgKind kind = PdgKind::Data;
  PdgSubkind subkind = PdgSubkind::Variable;
  std::string label;
  std::vector<NodeId> syntax_refs; // source order for merged variables
  bool anchor = false;

  // Anchor resolution info: the canonical syntax node this anchor stands
  // for, located relative to a graph-covered base node. Either `up_levels`
  // parent steps from the base (covered descendant), or `down_path` child
  // indices from it (covered ancestor fallback).
  NodeId anchor_node = kNoNode;
  NodeId base_node = kNoNode;
  int up_levels = 0;
  std::vector<int> down_path;
};

struct PdgEdge {
  int src = -1;
  int dst = -1;
  PdgEdgeKind kind = PdgEdgeKind::Data;
  PdgEdgeLabel label = PdgEdgeLabel::Para;
  int position = 0;           // operand slot for para edges, -1 for kwargs
  NodeId occurrence = kNoNode; // syntax node of this specific use site
};

/// Fine-grained program dependence graph of one function unit.
struct Pdg {
  std::vector<PdgNode> vertices;
  std::vector<PdgEdge> edges;
  NodeId unit = kNoNode;                 // FunctionDef (or module) node
  const SyntaxTree *tree = nullptr;      // non-owning; set by the builder
  std::unordered_map<NodeId, int> vertex_of_syntax; // syntax node -> vertex

  const PdgNode &vertex(int id) const { return vertices[id]; }
  bool valid_vertex(int id) const {
    return id >= 0 && id < static_cast<int>(vertices.size());
  }
  /// Vertex covering a syntax node, or -1.
  int vertex_for(NodeId syntax_node) const {
    auto it = vertex_of_syntax.find(syntax_node);
    return it == vertex_of_syntax.end() ? -1 : it->second;
  }
};

/// Builds the graph for one function unit (or for a whole module when
/// `unit_node` is the root). Deterministic: vertex ids follow traversal
/// order. Constructs without a graph rule contribute nothing.
Pdg build_fgpdg(const SyntaxTree &tree, NodeId unit_node);

/// Merged, sorted source spans of the given vertices' syntax refs. Anchor
/// vertices contribute no spans. Throws UnknownVertex.
std::vector<Span> highlight_spans(const Pdg &pdg, const std::set<int> &ids);

/// Line-oriented debug dump used for golden tests:
///   V <id> <kind> <subkind> "<label>"
///   E <src> <dst> <kind> <label>
std::string write_debug_graph(const Pdg &pdg);

} // namespace pdgfix
