#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pdgfix/errors.hpp"
#include "pdgfix/span.hpp"

namespace pdgfix {

using NodeId = int32_t;
constexpr NodeId kNoNode = -1;

/// Syntactic categories of the concrete syntax tree.
enum class NodeKind : uint8_t {
  Module,
  FunctionDef,
  ClassDef,
  Block,
  Arguments, // parameter list of a def/lambda, or argument list of a call
  Param,
  Annotation,
  Default,
  Decorator,
  ForStmt,
  WhileStmt,
  IfStmt,
  ElseClause,
  WithStmt,
  WithItem,
  TryStmt,
  ExceptClause,
  FinallyClause,
  ReturnStmt,
  RaiseStmt,
  DelStmt,
  AssertStmt,
  PassStmt,
  BreakStmt,
  ContinueStmt,
  GlobalStmt,
  NonlocalStmt,
  ImportStmt,
  ImportFrom,
  ImportAlias,
  ExprStmt,
  Assign,
  AnnAssign,
  AugAssign,
  Name,
  Literal,
  TupleExpr,
  ListExpr,
  SetExpr,
  DictExpr,
  DictItem,
  Starred,
  KeywordArg,
  Attribute,
  Subscript,
  Slice,
  Call,
  BinOp,
  BoolOp,
  UnaryOp,
  Compare,
  Lambda,
  IfExp,
  Await,
  Yield,
  NamedExpr,
  ListComp,
  SetComp,
  DictComp,
  GeneratorExp,
  CompFor,
  CompIf,
};

const char *kind_name(NodeKind kind);
std::optional<NodeKind> kind_from_name(std::string_view name);
bool is_statement_kind(NodeKind kind);
bool is_block_kind(NodeKind kind); // Module or Block

struct SyntaxNode {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::Module;
  std::string label; // identifier text, literal lexeme, operator symbol
  Span span;         // current best-known span (source position at parse)
  NodeId parent = kNoNode;
  std::vector<NodeId> children;

  // State recorded at parse time; used by render() to splice original bytes.
  bool from_source = false; // node existed in the parsed source
  std::string orig_label;
  std::vector<NodeId> orig_children;
};

/// Concrete syntax tree over one source buffer. Nodes live in an arena and
/// ids are never reused, including across edits within one session.
class SyntaxTree {
public:
  std::vector<SyntaxNode> nodes;
  NodeId root = kNoNode;
  std::string source;
  LineIndex lines;

  const SyntaxNode &at(NodeId id) const { return nodes[id]; }
  SyntaxNode &at(NodeId id) { return nodes[id]; }
  bool valid(NodeId id) const {
    return id >= 0 && id < static_cast<NodeId>(nodes.size());
  }

  NodeId make_node(NodeKind kind, std::string label, Span span = {});
  void append_child(NodeId parent, NodeId child);
  void insert_child(NodeId parent, NodeId child, size_t position);
  void detach(NodeId child);
  int child_index(NodeId id) const;

  /// True if `ancestor` is on the parent chain of `id` (or equal to it).
  bool is_ancestor(NodeId ancestor, NodeId id) const;

  std::string_view text_of(const Span &span) const {
    return std::string_view(source).substr(span.begin, span.size());
  }
  std::string_view text_of(NodeId id) const { return text_of(at(id).span); }

  /// Ids of all nodes reachable from `id`, preorder.
  std::vector<NodeId> subtree(NodeId id) const;
  /// Number of nodes reachable from `id`, excluding `id` itself.
  int descendant_count(NodeId id) const;
  int height(NodeId id) const;
};

/// One analyzable function definition inside a parsed module.
struct FunctionUnit {
  NodeId node = kNoNode;      // FunctionDef node
  std::string qualified_name; // "Class.method", "outer.inner"
};

/// Parse Python source into a concrete syntax tree. Throws ParseError with
/// the first offending position; any byte content is accepted as input.
SyntaxTree parse_source(std::string_view source);

/// All function definitions in source order, including methods and nested
/// functions (nested defs also analyze as part of their enclosing unit).
std::vector<FunctionUnit> function_units(const SyntaxTree &tree);

/// Print `tree` back to text. Bytes outside edited regions are spliced from
/// `original_source` unchanged; edited subtrees are pretty-printed at the
/// indentation of the region they replace. `touched` is the id set returned
/// by apply_edit_script.
std::string render(const SyntaxTree &tree, std::string_view original_source,
                   const std::set<NodeId> &touched);

/// Deterministic from-scratch printer for a subtree (4-space indents, single
/// spaces around binary operators, no wrapping).
std::string pretty_print(const SyntaxTree &tree, NodeId id,
                         const std::string &indent = "");

/// Kind/label/child-order equality; ignores spans and node ids.
bool structural_equal(const SyntaxTree &a, NodeId ida, const SyntaxTree &b,
                      NodeId idb);
bool structural_equal(const SyntaxTree &a, const SyntaxTree &b);

} // namespace pdgfix
