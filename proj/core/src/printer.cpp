#include <cctype>
#include <sstream>
#include <unordered_map>

#include "pdgfix/errors.hpp"
#include "pdgfix/syntax.hpp"

namespace pdgfix {

namespace {

// Binding strength used to decide parenthesization when printing.
int precedence(const SyntaxTree &t, NodeId id) {
  const SyntaxNode &n = t.at(id);
  switch (n.kind) {
  case NodeKind::NamedExpr:
  case NodeKind::Yield:
    return 1;
  case NodeKind::Lambda:
  case NodeKind::IfExp:
    return 2;
  case NodeKind::BoolOp:
    return n.label == "or" ? 4 : 5;
  case NodeKind::UnaryOp:
    return n.label == "not" ? 6 : 14;
  case NodeKind::Compare:
    return 7;
  case NodeKind::BinOp: {
    const std::string &op = n.label;
    if (op == "|")
      return 8;
    if (op == "^")
      return 9;
    if (op == "&")
      return 10;
    if (op == "<<" || op == ">>")
      return 11;
    if (op == "+" || op == "-")
      return 12;
    if (op == "**")
      return 16;
    return 13; // * @ / % //
  }
  case NodeKind::Await:
    return 15;
  case NodeKind::Call:
  case NodeKind::Subscript:
  case NodeKind::Attribute:
    return 17;
  default:
    return 18; // atoms and parenthesized forms
  }
}

class Printer {
public:
  explicit Printer(const SyntaxTree &tree) : t_(tree) {}

  std::string statement(NodeId id, const std::string &indent) {
    const SyntaxNode &n = t_.at(id);
    switch (n.kind) {
    case NodeKind::Module: {
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i)
          out += "\n";
        out += statement(n.children[i], "");
      }
      out += "\n";
      return out;
    }
    case NodeKind::Block:
      return block(id, indent);
    case NodeKind::FunctionDef:
      return function_def(id, indent);
    case NodeKind::ClassDef:
      return class_def(id, indent);
    case NodeKind::IfStmt:
      return if_stmt(id, indent);
    case NodeKind::WhileStmt: {
      std::string out = "while " + expr(n.children[0], 1) + ":";
      out += block(n.children[1], indent);
      if (n.children.size() > 2)
        out += tail_clause(n.children[2], indent);
      return out;
    }
    case NodeKind::ForStmt: {
      std::string out = n.label == "async" ? "async for " : "for ";
      out += for_target(n.children[0]);
      out += " in " + expr(n.children[1], 2) + ":";
      out += block(n.children[2], indent);
      if (n.children.size() > 3)
        out += tail_clause(n.children[3], indent);
      return out;
    }
    case NodeKind::WithStmt: {
      std::string out = n.label == "async" ? "async with " : "with ";
      size_t i = 0;
      for (; i < n.children.size() &&
             t_.at(n.children[i]).kind == NodeKind::WithItem;
           ++i) {
        if (i)
          out += ", ";
        out += with_item(n.children[i]);
      }
      out += ":";
      out += block(n.children[i], indent);
      return out;
    }
    case NodeKind::TryStmt: {
      std::string out = "try:";
      out += block(n.children[0], indent);
      for (size_t i = 1; i < n.children.size(); ++i)
        out += tail_clause(n.children[i], indent);
      return out;
    }
    case NodeKind::ReturnStmt:
      // yield/walrus need parentheses in a return value
      return n.children.empty() ? "return"
                                : "return " + expr(n.children[0], 2);
    case NodeKind::RaiseStmt: {
      if (n.children.empty())
        return "raise";
      std::string out = "raise " + expr(n.children[0], 2);
      if (n.children.size() > 1)
        out += " from " + expr(n.children[1], 2);
      return out;
    }
    case NodeKind::DelStmt: {
      std::string out = "del ";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + expr(n.children[i], 2);
      return out;
    }
    case NodeKind::AssertStmt: {
      std::string out = "assert " + expr(n.children[0], 2);
      if (n.children.size() > 1)
        out += ", " + expr(n.children[1], 2);
      return out;
    }
    case NodeKind::PassStmt:
      return "pass";
    case NodeKind::BreakStmt:
      return "break";
    case NodeKind::ContinueStmt:
      return "continue";
    case NodeKind::GlobalStmt:
    case NodeKind::NonlocalStmt: {
      std::string out =
          n.kind == NodeKind::GlobalStmt ? "global " : "nonlocal ";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + t_.at(n.children[i]).label;
      return out;
    }
    case NodeKind::ImportStmt: {
      std::string out = "import ";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + t_.at(n.children[i]).label;
      return out;
    }
    case NodeKind::ImportFrom: {
      std::string out = "from " + n.label + " import ";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + t_.at(n.children[i]).label;
      return out;
    }
    case NodeKind::ExprStmt: {
      NodeId child = n.children[0];
      if (t_.at(child).kind == NodeKind::Yield)
        return expr(child, 1);
      return expr(child, 2);
    }
    case NodeKind::Assign: {
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? " = " : "") + expr(n.children[i], 1);
      return out;
    }
    case NodeKind::AnnAssign: {
      std::string out = expr(n.children[0], 17) + ": " +
                        expr(t_.at(n.children[1]).children[0], 2);
      if (n.children.size() > 2)
        out += " = " + expr(n.children[2], 1);
      return out;
    }
    case NodeKind::AugAssign:
      return expr(n.children[0], 17) + " " + n.label + " " +
             expr(n.children[1], 1);
    default:
      // An expression in statement position (shouldn't normally happen).
      return expr(id, 2);
    }
  }

  std::string expr(NodeId id, int min_prec) {
    std::string out = expr_raw(id);
    if (precedence(t_, id) < min_prec)
      return "(" + out + ")";
    return out;
  }

private:
  std::string block(NodeId id, const std::string &indent) {
    const SyntaxNode &n = t_.at(id);
    if (n.kind != NodeKind::Block)
      throw RenderError("expected block node");
    std::string inner = indent + "    ";
    std::string out;
    for (NodeId child : n.children)
      out += "\n" + inner + statement(child, inner);
    if (n.children.empty())
      out += "\n" + inner + "pass";
    return out;
  }

  std::string tail_clause(NodeId id, const std::string &indent) {
    const SyntaxNode &n = t_.at(id);
    switch (n.kind) {
    case NodeKind::ElseClause:
      return "\n" + indent + "else:" + block(n.children[0], indent);
    case NodeKind::IfStmt: // elif
      return "\n" + indent + if_stmt(id, indent);
    case NodeKind::ExceptClause: {
      std::string out = "\n" + indent + "except";
      size_t i = 0;
      if (!n.children.empty() &&
          t_.at(n.children[0]).kind != NodeKind::Block) {
        out += " " + expr(n.children[0], 2);
        i = 1;
        if (t_.at(n.children[i]).kind == NodeKind::Name) {
          out += " as " + t_.at(n.children[i]).label;
          i = 2;
        }
      }
      out += ":" + block(n.children[i], indent);
      return out;
    }
    case NodeKind::FinallyClause:
      return "\n" + indent + "finally:" + block(n.children[0], indent);
    default:
      throw RenderError("unexpected clause kind");
    }
  }

  std::string if_stmt(NodeId id, const std::string &indent) {
    const SyntaxNode &n = t_.at(id);
    std::string out = n.label == "elif" ? "elif " : "if ";
    out += expr(n.children[0], 1) + ":";
    out += block(n.children[1], indent);
    if (n.children.size() > 2)
      out += tail_clause(n.children[2], indent);
    return out;
  }

  std::string function_def(NodeId id, const std::string &indent) {
    const SyntaxNode &n = t_.at(id);
    std::string out;
    size_t i = 0;
    for (; i < n.children.size() &&
           t_.at(n.children[i]).kind == NodeKind::Decorator;
         ++i)
      out += "@" + expr(t_.at(n.children[i]).children[0], 2) + "\n" + indent;
    if (n.label == "async")
      out += "async ";
    out += "def " + t_.at(n.children[i]).label;
    ++i;
    out += arguments(n.children[i]);
    ++i;
    if (i < n.children.size() &&
        t_.at(n.children[i]).kind == NodeKind::Annotation) {
      out += " -> " + expr(t_.at(n.children[i]).children[0], 2);
      ++i;
    }
    out += ":" + block(n.children[i], indent);
    return out;
  }

  std::string class_def(NodeId id, const std::string &indent) {
    const SyntaxNode &n = t_.at(id);
    std::string out;
    size_t i = 0;
    for (; i < n.children.size() &&
           t_.at(n.children[i]).kind == NodeKind::Decorator;
         ++i)
      out += "@" + expr(t_.at(n.children[i]).children[0], 2) + "\n" + indent;
    out += "class " + t_.at(n.children[i]).label;
    ++i;
    if (i < n.children.size() &&
        t_.at(n.children[i]).kind == NodeKind::Arguments) {
      out += arguments(n.children[i]);
      ++i;
    }
    out += ":" + block(n.children[i], indent);
    return out;
  }

  std::string with_item(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    std::string out = expr(n.children[0], 2);
    if (n.children.size() > 1)
      out += " as " + expr(n.children[1], 17);
    return out;
  }

  std::string for_target(NodeId id) {
    // Loop targets print tuples bare: "for i, v in ...".
    const SyntaxNode &n = t_.at(id);
    if (n.kind == NodeKind::TupleExpr && !n.children.empty()) {
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + expr(n.children[i], 8);
      return out;
    }
    return expr(id, 8);
  }

  std::string arguments(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    std::string out = "(";
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (i)
        out += ", ";
      out += argument(n.children[i]);
    }
    return out + ")";
  }

  std::string argument(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    switch (n.kind) {
    case NodeKind::Param: {
      std::string out = n.label;
      bool annotated = false;
      for (NodeId child : n.children) {
        const SyntaxNode &c = t_.at(child);
        if (c.kind == NodeKind::Annotation) {
          out += ": " + expr(c.children[0], 2);
          annotated = true;
        } else if (c.kind == NodeKind::Default) {
          out += annotated ? " = " : "=";
          out += expr(c.children[0], 2);
        }
      }
      return out;
    }
    case NodeKind::KeywordArg:
      if (n.label == "**")
        return "**" + expr(n.children[0], 2);
      return n.label + "=" + expr(n.children[0], 2);
    case NodeKind::Starred:
      return "*" + expr(n.children[0], 2);
    default:
      return expr(id, 2);
    }
  }

  std::string expr_raw(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    switch (n.kind) {
    case NodeKind::Name:
    case NodeKind::Literal:
      return n.label;
    case NodeKind::TupleExpr: {
      if (n.children.empty())
        return "()";
      std::string out = "(";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + argument(n.children[i]);
      if (n.children.size() == 1)
        out += ",";
      return out + ")";
    }
    case NodeKind::ListExpr: {
      std::string out = "[";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + argument(n.children[i]);
      return out + "]";
    }
    case NodeKind::SetExpr: {
      std::string out = "{";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + argument(n.children[i]);
      return out + "}";
    }
    case NodeKind::DictExpr: {
      std::string out = "{";
      for (size_t i = 0; i < n.children.size(); ++i)
        out += (i ? ", " : "") + dict_item(n.children[i]);
      return out + "}";
    }
    case NodeKind::Starred:
      return "*" + expr(n.children[0], 2);
    case NodeKind::KeywordArg:
      if (n.label == "**")
        return "**" + expr(n.children[0], 2);
      return n.label + "=" + expr(n.children[0], 2);
    case NodeKind::Attribute: {
      std::string base = expr(n.children[0], 17);
      const SyntaxNode &b = t_.at(n.children[0]);
      if (b.kind == NodeKind::Literal && !b.label.empty() &&
          (std::isdigit(static_cast<unsigned char>(b.label[0])) ||
           b.label[0] == '.'))
        base = "(" + base + ")";
      return base + "." + n.label;
    }
    case NodeKind::Subscript:
      return expr(n.children[0], 17) + "[" + subscript_index(n.children[1]) +
             "]";
    case NodeKind::Call:
      return expr(n.children[0], 17) + arguments(n.children[1]);
    case NodeKind::BinOp:
      return expr(n.children[0], n.label == "**" ? 17 : precedence(t_, id)) +
             " " + n.label + " " +
             expr(n.children[1],
                  n.label == "**" ? 14 : precedence(t_, id) + 1);
    case NodeKind::BoolOp: {
      std::string out;
      int inner = precedence(t_, id) + 1;
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i)
          out += " " + n.label + " ";
        out += expr(n.children[i], inner);
      }
      return out;
    }
    case NodeKind::UnaryOp: {
      if (n.label == "not")
        return "not " + expr(n.children[0], 6);
      return n.label + expr(n.children[0], 14);
    }
    case NodeKind::Compare: {
      std::vector<std::string> ops = split_ops(n.label);
      std::string out = expr(n.children[0], 8);
      for (size_t i = 1; i < n.children.size(); ++i) {
        const std::string &op = i - 1 < ops.size() ? ops[i - 1] : ops.back();
        out += " " + op + " " + expr(n.children[i], 8);
      }
      return out;
    }
    case NodeKind::Lambda: {
      std::string params;
      const SyntaxNode &p = t_.at(n.children[0]);
      for (size_t i = 0; i < p.children.size(); ++i)
        params += (i ? ", " : " ") + argument(p.children[i]);
      return "lambda" + params + ": " + expr(n.children[1], 2);
    }
    case NodeKind::IfExp:
      return expr(n.children[0], 4) + " if " + expr(n.children[1], 4) +
             " else " + expr(n.children[2], 2);
    case NodeKind::Await:
      return "await " + expr(n.children[0], 17);
    case NodeKind::Yield: {
      std::string out = n.label; // "yield" or "yield from"
      if (!n.children.empty())
        out += " " + expr(n.children[0], 2);
      return out;
    }
    case NodeKind::NamedExpr:
      return expr(n.children[0], 18) + " := " + expr(n.children[1], 2);
    case NodeKind::ListComp:
      return "[" + comp_body(id) + "]";
    case NodeKind::SetComp:
      return "{" + comp_body(id) + "}";
    case NodeKind::DictComp:
      return "{" + comp_body(id) + "}";
    case NodeKind::GeneratorExp:
      return "(" + comp_body(id) + ")";
    case NodeKind::Slice:
      return slice_text(id);
    case NodeKind::DictItem:
      return dict_item(id);
    default:
      throw RenderError(std::string("no printer rule for node kind '") +
                        kind_name(n.kind) + "'");
    }
  }

  std::string dict_item(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    if (n.label == "**")
      return "**" + expr(n.children[0], 8);
    return expr(n.children[0], 2) + ": " + expr(n.children[1], 2);
  }

  std::string comp_body(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    std::string out = n.kind == NodeKind::DictComp
                          ? dict_item(n.children[0])
                          : argument(n.children[0]);
    for (size_t i = 1; i < n.children.size(); ++i) {
      const SyntaxNode &c = t_.at(n.children[i]);
      out += c.label == "async" ? " async for " : " for ";
      out += for_target(c.children[0]);
      out += " in " + expr(c.children[1], 4);
      for (size_t j = 2; j < c.children.size(); ++j)
        out += " if " + expr(t_.at(c.children[j]).children[0], 4);
    }
    return out;
  }

  std::string subscript_index(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    if (n.kind == NodeKind::Slice)
      return slice_text(id);
    if (n.kind == NodeKind::TupleExpr && !n.children.empty()) {
      std::string out;
      for (size_t i = 0; i < n.children.size(); ++i) {
        const SyntaxNode &c = t_.at(n.children[i]);
        out += i ? ", " : "";
        out += c.kind == NodeKind::Slice ? slice_text(n.children[i])
                                         : expr(n.children[i], 2);
      }
      return out;
    }
    return expr(id, 2);
  }

  std::string slice_text(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    std::string out;
    size_t child = 0;
    for (char c : n.label) {
      if (c == ':')
        out += ":";
      else if (child < n.children.size())
        out += expr(n.children[child++], 2);
    }
    return out;
  }

  static std::vector<std::string> split_ops(const std::string &label) {
    std::vector<std::string> ops;
    size_t start = 0;
    while (start <= label.size()) {
      size_t semi = label.find(';', start);
      if (semi == std::string::npos) {
        ops.push_back(label.substr(start));
        break;
      }
      ops.push_back(label.substr(start, semi - start));
      start = semi + 1;
    }
    if (ops.empty())
      ops.push_back(label);
    return ops;
  }

  const SyntaxTree &t_;
};

} // namespace

std::string pretty_print_loop_target(const SyntaxTree &tree, NodeId id) {
  Printer printer(tree);
  const SyntaxNode &n = tree.at(id);
  if (n.kind != NodeKind::TupleExpr || n.children.empty())
    return printer.expr(id, 0);
  std::string out;
  for (size_t i = 0; i < n.children.size(); ++i)
    out += (i ? ", " : "") + printer.expr(n.children[i], 8);
  return out;
}

std::string pretty_print(const SyntaxTree &tree, NodeId id,
                         const std::string &indent) {
  Printer printer(tree);
  const SyntaxNode &n = tree.at(id);
  if (is_statement_kind(n.kind) || is_block_kind(n.kind))
    return printer.statement(id, indent);
  switch (n.kind) {
  case NodeKind::ElseClause:
  case NodeKind::ExceptClause:
  case NodeKind::FinallyClause:
  case NodeKind::Param:
  case NodeKind::KeywordArg:
  case NodeKind::Starred:
  case NodeKind::Arguments:
  case NodeKind::Annotation:
  case NodeKind::Default:
  case NodeKind::Decorator:
  case NodeKind::WithItem:
    // Fragments that only occur inside statements; printed by their parent.
    break;
  default:
    break;
  }
  return printer.expr(id, 0);
}

// ---------------------------------------------------------------------------
// render(): splice edited regions into the original byte stream.
// ---------------------------------------------------------------------------

namespace {

class Renderer {
public:
  Renderer(const SyntaxTree &tree, std::string_view original)
      : t_(tree), src_(original) {}

  std::string run() {
    if (t_.root == kNoNode)
      return std::string(src_);
    std::string out;
    emit(t_.root, "", out);
    return out;
  }

private:
  bool label_unchanged(const SyntaxNode &n) const {
    return n.from_source && n.label == n.orig_label;
  }

  bool children_unchanged(const SyntaxNode &n) const {
    return n.children == n.orig_children;
  }

  // A subtree is pristine when re-emitting its original bytes reproduces it.
  bool pristine(NodeId id) {
    auto it = pristine_cache_.find(id);
    if (it != pristine_cache_.end())
      return it->second;
    const SyntaxNode &n = t_.at(id);
    bool ok = label_unchanged(n) && children_unchanged(n);
    if (ok)
      for (NodeId child : n.children)
        if (!pristine(child)) {
          ok = false;
          break;
        }
    pristine_cache_[id] = ok;
    return ok;
  }

  std::string_view src_bytes(uint32_t begin, uint32_t end) const {
    if (begin > end || end > src_.size())
      return {};
    return src_.substr(begin, end - begin);
  }

  // Indentation of the line containing `offset`.
  std::string line_indent(uint32_t offset) const {
    size_t line_start = offset;
    while (line_start > 0 && src_[line_start - 1] != '\n')
      --line_start;
    size_t ws_end = line_start;
    while (ws_end < src_.size() && (src_[ws_end] == ' ' || src_[ws_end] == '\t'))
      ++ws_end;
    return std::string(src_.substr(line_start, ws_end - line_start));
  }

  void emit(NodeId id, const std::string &indent, std::string &out) {
    const SyntaxNode &n = t_.at(id);
    if (pristine(id)) {
      out += src_bytes(n.span.begin, n.span.end);
      return;
    }
    if (is_block_kind(n.kind) && n.from_source) {
      emit_block_splice(id, indent, out);
      return;
    }
    if (n.from_source && label_unchanged(n) && slot_splice_ok(n)) {
      emit_slot_splice(id, indent, out);
      return;
    }
    // Rebuilt from scratch at the indentation of the replaced region.
    std::string base =
        n.from_source ? line_indent(n.span.begin) : indent;
    out += pretty_print(t_, id, base);
  }

  // True when the child list has the same arity as at parse time and every
  // preserved child sits in its original slot; replaced slots are printed in
  // place while the node's own tokens are spliced from the source.
  bool slot_splice_ok(const SyntaxNode &n) const {
    if (n.children.size() != n.orig_children.size())
      return false;
    for (size_t i = 0; i < n.children.size(); ++i) {
      NodeId cur = n.children[i];
      // A preserved child must be in the same slot.
      for (size_t j = 0; j < n.orig_children.size(); ++j)
        if (n.orig_children[j] == cur && j != i)
          return false;
    }
    return true;
  }

  void emit_slot_splice(NodeId id, const std::string &indent,
                        std::string &out) {
    const SyntaxNode &n = t_.at(id);
    uint32_t cursor = n.span.begin;
    for (size_t i = 0; i < n.children.size(); ++i) {
      const SyntaxNode &slot = t_.at(n.orig_children[i]);
      out += src_bytes(cursor, slot.span.begin);
      NodeId child = n.children[i];
      // Loop targets keep the bare tuple form: "for i, v in ...".
      if (i == 0 && !pristine(child) &&
          (n.kind == NodeKind::ForStmt || n.kind == NodeKind::CompFor) &&
          t_.at(child).kind == NodeKind::TupleExpr)
        out += pretty_print_loop_target(t_, child);
      else
        emit(child, indent, out);
      cursor = slot.span.end;
    }
    out += src_bytes(cursor, n.span.end);
  }

  void emit_block_splice(NodeId id, const std::string &indent,
                         std::string &out) {
    const SyntaxNode &n = t_.at(id);
    std::string block_indent =
        n.orig_children.empty()
            ? indent
            : line_indent(t_.at(n.orig_children.front()).span.begin);

    auto orig_index = [&](NodeId child) -> int {
      for (size_t j = 0; j < n.orig_children.size(); ++j)
        if (n.orig_children[j] == child)
          return static_cast<int>(j);
      return -1;
    };

    for (size_t k = 0; k < n.children.size(); ++k) {
      NodeId child = n.children[k];
      int j = orig_index(child);
      bool in_place = j >= 0 && t_.at(child).parent == id;
      std::string sep;
      if (k == 0) {
        if (j == 0)
          sep = std::string(
              src_bytes(n.span.begin, t_.at(child).span.begin));
        // otherwise the surrounding context supplies the position
      } else {
        NodeId prev = n.children[k - 1];
        int jprev = orig_index(prev);
        if (in_place && j > 0 && jprev == j - 1) {
          // Adjacent in the original: keep the exact bytes between them
          // (comments and blank lines included).
          sep = std::string(src_bytes(t_.at(n.orig_children[j - 1]).span.end,
                                      t_.at(child).span.begin));
        } else if (in_place && j > 0 && jprev >= 0 && jprev < j - 1) {
          // Statements in between were deleted: keep the previous child's
          // trailing comment and this child's leading comments, drop the
          // deleted statements' lines.
          std::string lead(src_bytes(t_.at(n.orig_children[jprev]).span.end,
                                     t_.at(n.orig_children[jprev + 1]).span.begin));
          size_t last_nl = lead.find_last_of('\n');
          lead = last_nl == std::string::npos ? "" : lead.substr(0, last_nl + 1);
          std::string tail(src_bytes(t_.at(n.orig_children[j - 1]).span.end,
                                     t_.at(child).span.begin));
          size_t first_nl = tail.find('\n');
          if (first_nl != std::string::npos)
            tail = tail.substr(first_nl + 1);
          sep = lead + tail;
        }
        if (sep.empty())
          sep = "\n" + block_indent;
      }
      out += sep;
      emit(child, block_indent, out);
    }
    // Closing bytes (trailing comments / final newline of a module).
    if (!n.children.empty() && !n.orig_children.empty() &&
        n.children.back() == n.orig_children.back()) {
      out += src_bytes(t_.at(n.orig_children.back()).span.end, n.span.end);
    } else if (n.kind == NodeKind::Module) {
      out += "\n";
    }
  }

  const SyntaxTree &t_;
  std::string_view src_;
  std::unordered_map<NodeId, bool> pristine_cache_;
};

} // namespace

std::string render(const SyntaxTree &tree, std::string_view original_source,
                   const std::set<NodeId> &touched) {
  (void)touched; // edits are tracked on the nodes themselves
  Renderer renderer(tree, original_source);
  return renderer.run();
}

} // namespace pdgfix
