#include "pdgfix/fgpdg.hpp"

#include <algorithm>
#include <sstream>

#include "pdgfix/errors.hpp"

namespace pdgfix {

const char *pdg_kind_name(PdgKind kind) {
  switch (kind) {
  case PdgKind::Data:
    return "data";
  case PdgKind::Operation:
    return "operation";
  case PdgKind::Control:
    return "control";
  }
  return "?";
}

const char *pdg_subkind_name(PdgSubkind subkind) {
  switch (subkind) {
  case PdgSubkind::Variable:
    return "variable";
  case PdgSubkind::LiteralValue:
    return "literal";
  case PdgSubkind::FunctionRef:
    return "function-ref";
  case PdgSubkind::CallOp:
    return "call";
  case PdgSubkind::AssignOp:
    return "assign";
  case PdgSubkind::AugAssignOp:
    return "aug-assign";
  case PdgSubkind::BinaryOp:
    return "bin-op";
  case PdgSubkind::CompareOp:
    return "compare";
  case PdgSubkind::SubscriptLoad:
    return "subscript-load";
  case PdgSubkind::SubscriptStore:
    return "subscript-store";
  case PdgSubkind::AttributeLoad:
    return "attribute-load";
  case PdgSubkind::ForCtrl:
    return "for";
  case PdgSubkind::WhileCtrl:
    return "while";
  case PdgSubkind::IfCtrl:
    return "if";
  case PdgSubkind::WithCtrl:
    return "with";
  case PdgSubkind::TryCtrl:
    return "try";
  }
  return "?";
}

const char *pdg_edge_label_name(PdgEdgeLabel label) {
  switch (label) {
  case PdgEdgeLabel::Def:
    return "def";
  case PdgEdgeLabel::Use:
    return "use";
  case PdgEdgeLabel::Recv:
    return "recv";
  case PdgEdgeLabel::Para:
    return "para";
  case PdgEdgeLabel::Qual:
    return "qual";
  case PdgEdgeLabel::Dep:
    return "dep";
  case PdgEdgeLabel::TrueBranch:
    return "true-branch";
  case PdgEdgeLabel::FalseBranch:
    return "false-branch";
  case PdgEdgeLabel::Anchor:
    return "anchor";
  }
  return "?";
}

namespace {

class GraphBuilder {
public:
  GraphBuilder(const SyntaxTree &tree, NodeId unit) : t_(tree) {
    pdg_.unit = unit;
    pdg_.tree = &tree;
  }

  Pdg run() {
    const SyntaxNode &n = t_.at(pdg_.unit);
    if (n.kind == NodeKind::FunctionDef)
      build_function(pdg_.unit);
    else
      build_block_children(pdg_.unit);
    link_callee_qualifiers();
    return std::move(pdg_);
  }

private:
  // ---- vertex / edge primitives --------------------------------------

  int add_vertex(PdgKind kind, PdgSubkind subkind, std::string label,
                 NodeId syntax_ref) {
    PdgNode v;
    v.id = static_cast<int>(pdg_.vertices.size());
    v.kind = kind;
    v.subkind = subkind;
    v.label = std::move(label);
    if (syntax_ref != kNoNode) {
      v.syntax_refs.push_back(syntax_ref);
      pdg_.vertex_of_syntax.emplace(syntax_ref, v.id);
    }
    pdg_.vertices.push_back(std::move(v));
    return pdg_.vertices.back().id;
  }

  void add_edge(int src, int dst, PdgEdgeKind kind, PdgEdgeLabel label,
                int position = 0, NodeId occurrence = kNoNode) {
    if (src < 0 || dst < 0 || src == dst)
      return;
    pdg_.edges.push_back({src, dst, kind, label, position, occurrence});
  }

  int add_operation(PdgSubkind subkind, std::string label, NodeId node) {
    int v = add_vertex(PdgKind::Operation, subkind, std::move(label), node);
    attach_control(v);
    return v;
  }

  void attach_control(int v) {
    if (ctrl_ >= 0)
      add_edge(ctrl_, v, PdgEdgeKind::Control, branch_);
  }

  int var_vertex(const std::string &name, NodeId occurrence) {
    auto it = vars_.find(name);
    int v;
    if (it == vars_.end()) {
      v = add_vertex(PdgKind::Data, PdgSubkind::Variable, name, occurrence);
      vars_.emplace(name, v);
    } else {
      v = it->second;
      if (occurrence != kNoNode) {
        pdg_.vertices[v].syntax_refs.push_back(occurrence);
        pdg_.vertex_of_syntax.emplace(occurrence, v);
      }
    }
    return v;
  }

  // ---- expressions -----------------------------------------------------

  // Dotted path of a name/attribute chain, empty if the chain has another
  // expression at the root.
  std::string dotted_path(NodeId id, NodeId *root_name) const {
    const SyntaxNode &n = t_.at(id);
    if (n.kind == NodeKind::Name) {
      if (root_name)
        *root_name = id;
      return n.label;
    }
    if (n.kind == NodeKind::Attribute) {
      std::string base = dotted_path(n.children[0], root_name);
      if (base.empty())
        return "";
      return base + "." + n.label;
    }
    return "";
  }

  // Evaluates an expression whose value feeds an operation; returns the
  // vertex carrying the value, or -1 when the construct has no graph rule.
  int eval_used(NodeId id) { return eval(id, /*used=*/true); }

  // Evaluates for side effects only: operations inside are still built but
  // bare literals and displays are skipped.
  void eval_unused(NodeId id) { eval(id, /*used=*/false); }

  int eval(NodeId id, bool used) {
    const SyntaxNode &n = t_.at(id);
    switch (n.kind) {
    case NodeKind::Name:
      return var_vertex(n.label, id);
    case NodeKind::Literal:
      if (!used)
        return -1;
      return add_vertex(PdgKind::Data, PdgSubkind::LiteralValue, n.label, id);
    case NodeKind::TupleExpr:
    case NodeKind::ListExpr:
    case NodeKind::SetExpr:
    case NodeKind::DictExpr:
      return eval_display(id, used);
    case NodeKind::Attribute:
      return eval_attribute_load(id);
    case NodeKind::Subscript:
      return eval_subscript_load(id);
    case NodeKind::Call:
      return eval_call(id);
    case NodeKind::BinOp: {
      int op = add_operation(PdgSubkind::BinaryOp, n.label, id);
      for (size_t i = 0; i < n.children.size(); ++i)
        add_edge(eval_used(n.children[i]), op, PdgEdgeKind::Data,
                 PdgEdgeLabel::Para, static_cast<int>(i), n.children[i]);
      return op;
    }
    case NodeKind::BoolOp:
    case NodeKind::UnaryOp: {
      int op = add_operation(PdgSubkind::BinaryOp, n.label, id);
      for (size_t i = 0; i < n.children.size(); ++i)
        add_edge(eval_used(n.children[i]), op, PdgEdgeKind::Data,
                 PdgEdgeLabel::Para, static_cast<int>(i), n.children[i]);
      return op;
    }
    case NodeKind::Compare: {
      int op = add_operation(PdgSubkind::CompareOp, n.label, id);
      for (size_t i = 0; i < n.children.size(); ++i)
        add_edge(eval_used(n.children[i]), op, PdgEdgeKind::Data,
                 PdgEdgeLabel::Para, static_cast<int>(i), n.children[i]);
      return op;
    }
    case NodeKind::NamedExpr: {
      int op = add_operation(PdgSubkind::AssignOp, ":=", id);
      add_edge(eval_used(n.children[1]), op, PdgEdgeKind::Data,
               PdgEdgeLabel::Para, 0, n.children[1]);
      define_target(n.children[0], op);
      return op;
    }
    case NodeKind::Starred:
    case NodeKind::Await:
      return eval(n.children[0], used);
    case NodeKind::Yield:
      for (NodeId child : n.children)
        eval_unused(child);
      return -1;
    case NodeKind::IfExp:
      for (NodeId child : n.children)
        eval_unused(child);
      return -1;
    case NodeKind::Lambda:
      return -1; // separate scope, no rule here
    case NodeKind::ListComp:
    case NodeKind::SetComp:
    case NodeKind::DictComp:
    case NodeKind::GeneratorExp: {
      for (size_t i = 1; i < n.children.size(); ++i) {
        const SyntaxNode &clause = t_.at(n.children[i]);
        if (clause.kind != NodeKind::CompFor)
          continue;
        define_target(clause.children[0], -1);
        eval_unused(clause.children[1]);
        for (size_t j = 2; j < clause.children.size(); ++j)
          eval_unused(t_.at(clause.children[j]).children[0]);
      }
      NodeId elt = n.children[0];
      if (t_.at(elt).kind == NodeKind::DictItem) {
        for (NodeId child : t_.at(elt).children)
          eval_unused(child);
      } else {
        eval_unused(elt);
      }
      return -1;
    }
    case NodeKind::DictItem:
      for (NodeId child : n.children)
        eval_unused(child);
      return -1;
    case NodeKind::Slice:
      for (NodeId child : n.children)
        eval_unused(child);
      return -1;
    case NodeKind::KeywordArg:
      return eval(n.children[0], used);
    default:
      return -1;
    }
  }

  int eval_display(NodeId id, bool used) {
    const SyntaxNode &n = t_.at(id);
    for (NodeId child : n.children)
      eval_unused(child);
    if (!used)
      return -1;
    const char *label = n.kind == NodeKind::ListExpr   ? "[]"
                        : n.kind == NodeKind::TupleExpr ? "()"
                        : n.kind == NodeKind::DictExpr  ? "{}"
                                                        : "{*}";
    return add_vertex(PdgKind::Data, PdgSubkind::LiteralValue, label, id);
  }

  int eval_attribute_load(NodeId id) {
    NodeId root = kNoNode;
    std::string path = dotted_path(id, &root);
    if (!path.empty()) {
      int op = add_operation(PdgSubkind::AttributeLoad, path, id);
      add_edge(var_vertex(t_.at(root).label, root), op, PdgEdgeKind::Data,
               PdgEdgeLabel::Qual, 0, root);
      return op;
    }
    const SyntaxNode &n = t_.at(id);
    int op = add_operation(PdgSubkind::AttributeLoad, "." + n.label, id);
    add_edge(eval_used(n.children[0]), op, PdgEdgeKind::Data,
             PdgEdgeLabel::Qual, 0, n.children[0]);
    return op;
  }

  int eval_subscript_load(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    int op = add_operation(PdgSubkind::SubscriptLoad, "[]", id);
    add_edge(eval_used(n.children[0]), op, PdgEdgeKind::Data,
             PdgEdgeLabel::Qual, 0, n.children[0]);
    add_edge(eval_used(n.children[1]), op, PdgEdgeKind::Data,
             PdgEdgeLabel::Para, 0, n.children[1]);
    return op;
  }

  int eval_call(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    NodeId callee = n.children[0];
    NodeId args = n.children[1];
    int op = add_operation(PdgSubkind::CallOp, "()", id);

    NodeId root = kNoNode;
    std::string path = dotted_path(callee, &root);
    if (!path.empty()) {
      int fref = add_vertex(PdgKind::Data, PdgSubkind::FunctionRef, path,
                            callee);
      if (t_.at(callee).kind == NodeKind::Attribute)
        add_edge(var_vertex(t_.at(root).label, root), fref, PdgEdgeKind::Data,
                 PdgEdgeLabel::Qual, 0, root);
      else
        plain_callees_.push_back({fref, callee});
      add_edge(fref, op, PdgEdgeKind::Data, PdgEdgeLabel::Recv, 0, callee);
    } else {
      add_edge(eval_used(callee), op, PdgEdgeKind::Data, PdgEdgeLabel::Recv,
               0, callee);
    }

    int position = 0;
    for (NodeId arg : t_.at(args).children) {
      const SyntaxNode &a = t_.at(arg);
      if (a.kind == NodeKind::KeywordArg) {
        add_edge(eval_used(a.children[0]), op, PdgEdgeKind::Data,
                 PdgEdgeLabel::Para, -1, a.children[0]);
        continue;
      }
      NodeId value = a.kind == NodeKind::Starred ? a.children[0] : arg;
      add_edge(eval_used(value), op, PdgEdgeKind::Data, PdgEdgeLabel::Para,
               position, value);
      ++position;
    }
    return op;
  }

  // ---- assignment targets ---------------------------------------------

  // Adds def edges from `source` (operation or value vertex; -1 for plain
  // binders like loop targets handled by the caller) to the bound variables.
  void define_target(NodeId target, int source,
                     PdgEdgeLabel label = PdgEdgeLabel::Def) {
    const SyntaxNode &n = t_.at(target);
    switch (n.kind) {
    case NodeKind::Name: {
      int v = var_vertex(n.label, target);
      if (source >= 0)
        add_edge(source, v, PdgEdgeKind::Data, label, 0, target);
      return;
    }
    case NodeKind::TupleExpr:
    case NodeKind::ListExpr:
      for (NodeId child : n.children)
        define_target(child, source, label);
      return;
    case NodeKind::Starred:
      define_target(n.children[0], source, label);
      return;
    case NodeKind::Attribute: {
      NodeId root = kNoNode;
      if (!dotted_path(target, &root).empty()) {
        int v = var_vertex(t_.at(root).label, root);
        if (source >= 0)
          add_edge(source, v, PdgEdgeKind::Data, label, 0, root);
      } else {
        eval_unused(n.children[0]);
      }
      return;
    }
    case NodeKind::Subscript: {
      int op = add_operation(PdgSubkind::SubscriptStore, "[]", target);
      add_edge(eval_used(n.children[0]), op, PdgEdgeKind::Data,
               PdgEdgeLabel::Qual, 0, n.children[0]);
      add_edge(eval_used(n.children[1]), op, PdgEdgeKind::Data,
               PdgEdgeLabel::Para, 0, n.children[1]);
      if (source >= 0)
        add_edge(source, op, PdgEdgeKind::Data, PdgEdgeLabel::Para, 1);
      NodeId root = kNoNode;
      if (!dotted_path(n.children[0], &root).empty())
        add_edge(op, var_vertex(t_.at(root).label, root), PdgEdgeKind::Data,
                 PdgEdgeLabel::Def, 0, root);
      return;
    }
    default:
      eval_unused(target);
      return;
    }
  }

  bool has_name_target(NodeId target) const {
    const SyntaxNode &n = t_.at(target);
    switch (n.kind) {
    case NodeKind::Name:
      return true;
    case NodeKind::TupleExpr:
    case NodeKind::ListExpr:
    case NodeKind::Starred:
      for (NodeId child : n.children)
        if (has_name_target(child))
          return true;
      return false;
    case NodeKind::Attribute:
      return true; // binds through the root object
    default:
      return false;
    }
  }

  // ---- statements -------------------------------------------------------

  void build_block_children(NodeId block) {
    for (NodeId child : t_.at(block).children)
      build_stmt(child);
  }

  void build_function(NodeId def) {
    const SyntaxNode &n = t_.at(def);
    for (NodeId child : n.children) {
      const SyntaxNode &c = t_.at(child);
      if (c.kind == NodeKind::Arguments) {
        for (NodeId param : c.children) {
          const SyntaxNode &p = t_.at(param);
          if (p.kind != NodeKind::Param)
            continue;
          std::string name = p.label;
          name.erase(0, name.find_first_not_of('*'));
          if (name.empty() || name == "/")
            continue;
          int v = var_vertex(name, param);
          for (NodeId pc : p.children)
            if (t_.at(pc).kind == NodeKind::Default) {
              int value = eval_used(t_.at(pc).children[0]);
              add_edge(value, v, PdgEdgeKind::Data, PdgEdgeLabel::Def, 0,
                       param);
            }
        }
      } else if (c.kind == NodeKind::Block) {
        build_block_children(child);
      }
    }
  }

  void build_stmt(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    switch (n.kind) {
    case NodeKind::ExprStmt:
      eval_unused(n.children[0]);
      return;
    case NodeKind::Assign: {
      size_t value_index = n.children.size() - 1;
      int value = eval_used(n.children[value_index]);
      bool needs_assign_op = false;
      for (size_t i = 0; i < value_index; ++i)
        if (has_name_target(n.children[i]))
          needs_assign_op = true;
      int op = -1;
      if (needs_assign_op) {
        op = add_operation(PdgSubkind::AssignOp, "=", id);
        add_edge(value, op, PdgEdgeKind::Data, PdgEdgeLabel::Para, 0,
                 n.children[value_index]);
      }
      for (size_t i = 0; i < value_index; ++i) {
        const SyntaxNode &target = t_.at(n.children[i]);
        if (target.kind == NodeKind::Subscript)
          define_subscript_store(n.children[i], value);
        else
          define_target(n.children[i], op);
      }
      return;
    }
    case NodeKind::AnnAssign: {
      if (n.children.size() > 2) {
        int value = eval_used(n.children[2]);
        int op = add_operation(PdgSubkind::AssignOp, "=", id);
        add_edge(value, op, PdgEdgeKind::Data, PdgEdgeLabel::Para, 0,
                 n.children[2]);
        define_target(n.children[0], op);
      } else {
        define_target(n.children[0], -1);
      }
      return;
    }
    case NodeKind::AugAssign: {
      int op = add_operation(PdgSubkind::AugAssignOp, n.label, id);
      const SyntaxNode &target = t_.at(n.children[0]);
      if (target.kind == NodeKind::Name) {
        int v = var_vertex(target.label, n.children[0]);
        add_edge(v, op, PdgEdgeKind::Data, PdgEdgeLabel::Para, 0,
                 n.children[0]);
        add_edge(op, v, PdgEdgeKind::Data, PdgEdgeLabel::Def, 0,
                 n.children[0]);
      } else {
        int current = eval_used(n.children[0]);
        add_edge(current, op, PdgEdgeKind::Data, PdgEdgeLabel::Para, 0,
                 n.children[0]);
        NodeId root = kNoNode;
        if (!dotted_path(target.kind == NodeKind::Subscript ||
                                 target.kind == NodeKind::Attribute
                             ? target.children[0]
                             : n.children[0],
                         &root)
                 .empty())
          add_edge(op, var_vertex(t_.at(root).label, root), PdgEdgeKind::Data,
                   PdgEdgeLabel::Def, 0, root);
      }
      add_edge(eval_used(n.children[1]), op, PdgEdgeKind::Data,
               PdgEdgeLabel::Para, 1, n.children[1]);
      return;
    }
    case NodeKind::ReturnStmt:
    case NodeKind::DelStmt:
    case NodeKind::AssertStmt:
      for (NodeId child : n.children)
        eval_unused(child);
      return;
    case NodeKind::RaiseStmt:
      for (NodeId child : n.children)
        eval_unused(child);
      return;
    case NodeKind::IfStmt:
      build_if(id, /*parent_branch=*/branch_);
      return;
    case NodeKind::WhileStmt: {
      int ctrl = add_control(PdgSubkind::WhileCtrl, "while", id);
      ControlScope scope(this, ctrl, PdgEdgeLabel::Dep);
      int test = eval_used(n.children[0]);
      add_edge(test, ctrl, PdgEdgeKind::Data, PdgEdgeLabel::Use, 0,
               n.children[0]);
      build_block_children(n.children[1]);
      if (n.children.size() > 2)
        build_clause(n.children[2]);
      return;
    }
    case NodeKind::ForStmt: {
      int ctrl = add_control(PdgSubkind::ForCtrl,
                             n.label == "async" ? "for" : "for", id);
      ControlScope scope(this, ctrl, PdgEdgeLabel::Dep);
      int iter = eval_used(n.children[1]);
      add_edge(iter, ctrl, PdgEdgeKind::Data, PdgEdgeLabel::Use, 0,
               n.children[1]);
      define_target(n.children[0], ctrl);
      build_block_children(n.children[2]);
      if (n.children.size() > 3)
        build_clause(n.children[3]);
      return;
    }
    case NodeKind::WithStmt: {
      int ctrl = add_control(PdgSubkind::WithCtrl, "with", id);
      ControlScope scope(this, ctrl, PdgEdgeLabel::Dep);
      int position = 0;
      for (NodeId child : n.children) {
        const SyntaxNode &c = t_.at(child);
        if (c.kind == NodeKind::WithItem) {
          int ctx = eval_used(c.children[0]);
          add_edge(ctx, ctrl, PdgEdgeKind::Data, PdgEdgeLabel::Use, position++,
                   c.children[0]);
          if (c.children.size() > 1)
            define_target(c.children[1], ctrl);
        } else if (c.kind == NodeKind::Block) {
          build_block_children(child);
        }
      }
      return;
    }
    case NodeKind::TryStmt: {
      int ctrl = add_control(PdgSubkind::TryCtrl, "try", id);
      ControlScope scope(this, ctrl, PdgEdgeLabel::Dep);
      for (NodeId child : n.children) {
        const SyntaxNode &c = t_.at(child);
        if (c.kind == NodeKind::Block) {
          build_block_children(child);
        } else if (c.kind == NodeKind::ExceptClause) {
          size_t i = 0;
          if (i < c.children.size() &&
              t_.at(c.children[i]).kind != NodeKind::Block &&
              t_.at(c.children[i]).kind != NodeKind::Name)
            eval_unused(c.children[i++]);
          if (i < c.children.size() &&
              t_.at(c.children[i]).kind == NodeKind::Name)
            define_target(c.children[i++], ctrl);
          if (i < c.children.size())
            build_block_children(c.children[i]);
        } else {
          build_clause(child);
        }
      }
      return;
    }
    case NodeKind::FunctionDef:
      build_function(id);
      return;
    case NodeKind::ClassDef:
      for (NodeId child : n.children)
        if (t_.at(child).kind == NodeKind::Block)
          build_block_children(child);
      return;
    default:
      return; // no graph rule (pass, import, global, ...)
    }
  }

  void define_subscript_store(NodeId target, int value) {
    const SyntaxNode &n = t_.at(target);
    int op = add_operation(PdgSubkind::SubscriptStore, "[]", target);
    add_edge(eval_used(n.children[0]), op, PdgEdgeKind::Data,
             PdgEdgeLabel::Qual, 0, n.children[0]);
    add_edge(eval_used(n.children[1]), op, PdgEdgeKind::Data,
             PdgEdgeLabel::Para, 0, n.children[1]);
    add_edge(value, op, PdgEdgeKind::Data, PdgEdgeLabel::Para, 1);
    NodeId root = kNoNode;
    if (!dotted_path(n.children[0], &root).empty())
      add_edge(op, var_vertex(t_.at(root).label, root), PdgEdgeKind::Data,
               PdgEdgeLabel::Def, 0, root);
  }

  void build_if(NodeId id, PdgEdgeLabel parent_branch) {
    const SyntaxNode &n = t_.at(id);
    int ctrl = add_vertex(PdgKind::Control, PdgSubkind::IfCtrl, "if", id);
    if (ctrl_ >= 0)
      add_edge(ctrl_, ctrl, PdgEdgeKind::Control, parent_branch);
    {
      ControlScope scope(this, ctrl, PdgEdgeLabel::Dep);
      int test = eval_used(n.children[0]);
      add_edge(test, ctrl, PdgEdgeKind::Data, PdgEdgeLabel::Use, 0,
               n.children[0]);
    }
    {
      ControlScope scope(this, ctrl, PdgEdgeLabel::TrueBranch);
      build_block_children(n.children[1]);
    }
    if (n.children.size() > 2) {
      NodeId tail = n.children[2];
      const SyntaxNode &tail_node = t_.at(tail);
      ControlScope scope(this, ctrl, PdgEdgeLabel::FalseBranch);
      if (tail_node.kind == NodeKind::IfStmt)
        build_if(tail, PdgEdgeLabel::FalseBranch);
      else if (tail_node.kind == NodeKind::ElseClause)
        build_block_children(tail_node.children[0]);
    }
  }

  void build_clause(NodeId id) {
    const SyntaxNode &n = t_.at(id);
    if (n.kind == NodeKind::ElseClause || n.kind == NodeKind::FinallyClause)
      build_block_children(n.children[0]);
  }

  int add_control(PdgSubkind subkind, std::string label, NodeId node) {
    int v = add_vertex(PdgKind::Control, subkind, std::move(label), node);
    attach_control(v);
    return v;
  }

  // Late qual edges for plain-name callees that turn out to be local
  // variables (assigned or otherwise used in this unit).
  void link_callee_qualifiers() {
    for (auto &[fref, callee] : plain_callees_) {
      auto it = vars_.find(pdg_.vertices[fref].label);
      if (it != vars_.end())
        add_edge(it->second, fref, PdgEdgeKind::Data, PdgEdgeLabel::Qual, 0,
                 callee);
    }
  }

  struct ControlScope {
    GraphBuilder *builder;
    int saved_ctrl;
    PdgEdgeLabel saved_branch;
    ControlScope(GraphBuilder *builder, int ctrl, PdgEdgeLabel branch)
        : builder(builder), saved_ctrl(builder->ctrl_),
          saved_branch(builder->branch_) {
      builder->ctrl_ = ctrl;
      builder->branch_ = branch;
    }
    ~ControlScope() {
      builder->ctrl_ = saved_ctrl;
      builder->branch_ = saved_branch;
    }
  };

  const SyntaxTree &t_;
  Pdg pdg_;
  std::map<std::string, int> vars_;
  std::vector<std::pair<int, NodeId>> plain_callees_;
  int ctrl_ = -1;
  PdgEdgeLabel branch_ = PdgEdgeLabel::Dep;
};

} // namespace

Pdg build_fgpdg(const SyntaxTree &tree, NodeId unit_node) {
  return GraphBuilder(tree, unit_node).run();
}

std::vector<Span> highlight_spans(const Pdg &pdg, const std::set<int> &ids) {
  std::vector<Span> spans;
  for (int id : ids) {
    if (!pdg.valid_vertex(id))
      throw UnknownVertex("unknown vertex " + std::to_string(id));
    const PdgNode &v = pdg.vertex(id);
    if (v.anchor)
      continue;
    for (NodeId ref : v.syntax_refs)
      spans.push_back(pdg.tree->at(ref).span);
  }
  return merge_spans(std::move(spans));
}

std::string write_debug_graph(const Pdg &pdg) {
  // Canonical vertex order: by first syntax ref span start, anchors last.
  std::vector<int> order;
  for (const PdgNode &v : pdg.vertices)
    order.push_back(v.id);
  auto sort_key = [&pdg](int id) -> std::pair<uint32_t, int> {
    const PdgNode &v = pdg.vertex(id);
    if (v.anchor || v.syntax_refs.empty())
      return {UINT32_MAX, id};
    return {pdg.tree->at(v.syntax_refs.front()).span.begin, id};
  };
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return sort_key(a) < sort_key(b); });

  std::ostringstream out;
  for (int id : order) {
    const PdgNode &v = pdg.vertex(id);
    out << "V " << v.id << " " << pdg_kind_name(v.kind) << " "
        << pdg_subkind_name(v.subkind) << " \"" << v.label << "\"\n";
  }
  std::vector<PdgEdge> edges = pdg.edges;
  std::sort(edges.begin(), edges.end(), [](const PdgEdge &a, const PdgEdge &b) {
    return std::tie(a.src, a.dst, a.kind, a.label, a.position) <
           std::tie(b.src, b.dst, b.kind, b.label, b.position);
  });
  for (const PdgEdge &e : edges) {
    out << "E " << e.src << " " << e.dst << " "
        << (e.kind == PdgEdgeKind::Control ? "control" : "data") << " "
        << pdg_edge_label_name(e.label) << "\n";
  }
  return out.str();
}

} // namespace pdgfix
