#include "pdgfix/syntax.hpp"

#include <algorithm>
#include <unordered_map>

namespace pdgfix {

std::vector<Span> merge_spans(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> out;
  for (const Span &s : spans) {
    if (!out.empty() && s.begin <= out.back().end)
      out.back().end = std::max(out.back().end, s.end);
    else
      out.push_back(s);
  }
  return out;
}

namespace {
struct KindName {
  NodeKind kind;
  const char *name;
};
constexpr KindName kKindNames[] = {
    {NodeKind::Module, "module"},
    {NodeKind::FunctionDef, "function-def"},
    {NodeKind::ClassDef, "class-def"},
    {NodeKind::Block, "block"},
    {NodeKind::Arguments, "arguments"},
    {NodeKind::Param, "param"},
    {NodeKind::Annotation, "annotation"},
    {NodeKind::Default, "default"},
    {NodeKind::Decorator, "decorator"},
    {NodeKind::ForStmt, "for-stmt"},
    {NodeKind::WhileStmt, "while-stmt"},
    {NodeKind::IfStmt, "if-stmt"},
    {NodeKind::ElseClause, "else-clause"},
    {NodeKind::WithStmt, "with-stmt"},
    {NodeKind::WithItem, "with-item"},
    {NodeKind::TryStmt, "try-stmt"},
    {NodeKind::ExceptClause, "except-clause"},
    {NodeKind::FinallyClause, "finally-clause"},
    {NodeKind::ReturnStmt, "return-stmt"},
    {NodeKind::RaiseStmt, "raise-stmt"},
    {NodeKind::DelStmt, "del-stmt"},
    {NodeKind::AssertStmt, "assert-stmt"},
    {NodeKind::PassStmt, "pass-stmt"},
    {NodeKind::BreakStmt, "break-stmt"},
    {NodeKind::ContinueStmt, "continue-stmt"},
    {NodeKind::GlobalStmt, "global-stmt"},
    {NodeKind::NonlocalStmt, "nonlocal-stmt"},
    {NodeKind::ImportStmt, "import-stmt"},
    {NodeKind::ImportFrom, "import-from"},
    {NodeKind::ImportAlias, "import-alias"},
    {NodeKind::ExprStmt, "expr-stmt"},
    {NodeKind::Assign, "assign"},
    {NodeKind::AnnAssign, "ann-assign"},
    {NodeKind::AugAssign, "aug-assign"},
    {NodeKind::Name, "name"},
    {NodeKind::Literal, "literal"},
    {NodeKind::TupleExpr, "tuple"},
    {NodeKind::ListExpr, "list"},
    {NodeKind::SetExpr, "set"},
    {NodeKind::DictExpr, "dict"},
    {NodeKind::DictItem, "dict-item"},
    {NodeKind::Starred, "starred"},
    {NodeKind::KeywordArg, "keyword-arg"},
    {NodeKind::Attribute, "attribute"},
    {NodeKind::Subscript, "subscript"},
    {NodeKind::Slice, "slice"},
    {NodeKind::Call, "call"},
    {NodeKind::BinOp, "bin-op"},
    {NodeKind::BoolOp, "bool-op"},
    {NodeKind::UnaryOp, "unary-op"},
    {NodeKind::Compare, "compare"},
    {NodeKind::Lambda, "lambda"},
    {NodeKind::IfExp, "if-exp"},
    {NodeKind::Await, "await"},
    {NodeKind::Yield, "yield"},
    {NodeKind::NamedExpr, "named-expr"},
    {NodeKind::ListComp, "list-comp"},
    {NodeKind::SetComp, "set-comp"},
    {NodeKind::DictComp, "dict-comp"},
    {NodeKind::GeneratorExp, "generator-exp"},
    {NodeKind::CompFor, "comp-for"},
    {NodeKind::CompIf, "comp-if"},
};
} // namespace

const char *kind_name(NodeKind kind) {
  for (const auto &entry : kKindNames)
    if (entry.kind == kind)
      return entry.name;
  return "?";
}

std::optional<NodeKind> kind_from_name(std::string_view name) {
  for (const auto &entry : kKindNames)
    if (entry.name == name)
      return entry.kind;
  return std::nullopt;
}

bool is_statement_kind(NodeKind kind) {
  switch (kind) {
  case NodeKind::FunctionDef:
  case NodeKind::ClassDef:
  case NodeKind::ForStmt:
  case NodeKind::WhileStmt:
  case NodeKind::IfStmt:
  case NodeKind::WithStmt:
  case NodeKind::TryStmt:
  case NodeKind::ReturnStmt:
  case NodeKind::RaiseStmt:
  case NodeKind::DelStmt:
  case NodeKind::AssertStmt:
  case NodeKind::PassStmt:
  case NodeKind::BreakStmt:
  case NodeKind::ContinueStmt:
  case NodeKind::GlobalStmt:
  case NodeKind::NonlocalStmt:
  case NodeKind::ImportStmt:
  case NodeKind::ImportFrom:
  case NodeKind::ExprStmt:
  case NodeKind::Assign:
  case NodeKind::AnnAssign:
  case NodeKind::AugAssign:
    return true;
  default:
    return false;
  }
}

bool is_block_kind(NodeKind kind) {
  return kind == NodeKind::Module || kind == NodeKind::Block;
}

NodeId SyntaxTree::make_node(NodeKind kind, std::string label, Span span) {
  NodeId id = static_cast<NodeId>(nodes.size());
  SyntaxNode node;
  node.id = id;
  node.kind = kind;
  node.label = std::move(label);
  node.span = span;
  nodes.push_back(std::move(node));
  return id;
}

void SyntaxTree::append_child(NodeId parent, NodeId child) {
  nodes[parent].children.push_back(child);
  nodes[child].parent = parent;
}

void SyntaxTree::insert_child(NodeId parent, NodeId child, size_t position) {
  auto &kids = nodes[parent].children;
  position = std::min(position, kids.size());
  kids.insert(kids.begin() + static_cast<ptrdiff_t>(position), child);
  nodes[child].parent = parent;
}

void SyntaxTree::detach(NodeId child) {
  NodeId parent = nodes[child].parent;
  if (parent == kNoNode)
    return;
  auto &kids = nodes[parent].children;
  kids.erase(std::remove(kids.begin(), kids.end(), child), kids.end());
  nodes[child].parent = kNoNode;
}

int SyntaxTree::child_index(NodeId id) const {
  NodeId parent = nodes[id].parent;
  if (parent == kNoNode)
    return -1;
  const auto &kids = nodes[parent].children;
  auto it = std::find(kids.begin(), kids.end(), id);
  return it == kids.end() ? -1 : static_cast<int>(it - kids.begin());
}

bool SyntaxTree::is_ancestor(NodeId ancestor, NodeId id) const {
  for (NodeId cur = id; cur != kNoNode; cur = nodes[cur].parent)
    if (cur == ancestor)
      return true;
  return false;
}

std::vector<NodeId> SyntaxTree::subtree(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    const auto &kids = nodes[cur].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      stack.push_back(*it);
  }
  return out;
}

int SyntaxTree::descendant_count(NodeId id) const {
  return static_cast<int>(subtree(id).size()) - 1;
}

int SyntaxTree::height(NodeId id) const {
  int best = 0;
  for (NodeId child : nodes[id].children)
    best = std::max(best, height(child));
  return best + 1;
}

std::vector<FunctionUnit> function_units(const SyntaxTree &tree) {
  std::vector<FunctionUnit> units;
  if (tree.root == kNoNode)
    return units;
  // Depth-first in source order, tracking the enclosing def/class names.
  struct Frame {
    NodeId node;
    std::string prefix;
  };
  std::vector<Frame> stack{{tree.root, ""}};
  while (!stack.empty()) {
    Frame frame = stack.back();
    stack.pop_back();
    const SyntaxNode &node = tree.at(frame.node);
    std::string prefix = frame.prefix;
    if (node.kind == NodeKind::FunctionDef || node.kind == NodeKind::ClassDef) {
      std::string own;
      for (NodeId child : node.children)
        if (tree.at(child).kind == NodeKind::Name) {
          own = tree.at(child).label;
          break;
        }
      std::string qualified = prefix.empty() ? own : prefix + "." + own;
      if (node.kind == NodeKind::FunctionDef)
        units.push_back({frame.node, qualified});
      prefix = qualified;
    }
    const auto &kids = node.children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      stack.push_back({*it, prefix});
  }
  std::sort(units.begin(), units.end(),
            [&tree](const FunctionUnit &a, const FunctionUnit &b) {
              return tree.at(a.node).span.begin < tree.at(b.node).span.begin;
            });
  return units;
}

bool structural_equal(const SyntaxTree &a, NodeId ida, const SyntaxTree &b,
                      NodeId idb) {
  const SyntaxNode &na = a.at(ida);
  const SyntaxNode &nb = b.at(idb);
  if (na.kind != nb.kind || na.label != nb.label ||
      na.children.size() != nb.children.size())
    return false;
  for (size_t i = 0; i < na.children.size(); ++i)
    if (!structural_equal(a, na.children[i], b, nb.children[i]))
      return false;
  return true;
}

bool structural_equal(const SyntaxTree &a, const SyntaxTree &b) {
  if (a.root == kNoNode || b.root == kNoNode)
    return a.root == b.root;
  return structural_equal(a, a.root, b, b.root);
}

} // namespace pdgfix
