#include <algorithm>
#include <unordered_set>

#include "pdgfix/errors.hpp"
#include "pdgfix/syntax.hpp"
#include "tokenizer.hpp"

namespace pdgfix {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "False",  "None",   "True",    "and",      "as",       "assert", "async",
    "await",  "break",  "class",   "continue", "def",      "del",    "elif",
    "else",   "except", "finally", "for",      "from",     "global", "if",
    "import", "in",     "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",   "raise",  "return",  "try",      "while",    "with",   "yield"};

const std::unordered_set<std::string_view> kAugOps = {
    "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=",
    "**="};

class Parser {
public:
  explicit Parser(std::string_view source) : source_(source) {
    tokens_ = tokenize(source);
  }

  SyntaxTree run() {
    tree_.source = std::string(source_);
    tree_.lines = LineIndex(source_);
    NodeId module = tree_.make_node(
        NodeKind::Module, "",
        {0, static_cast<uint32_t>(source_.size())});
    tree_.root = module;
    while (!at(TokKind::End)) {
      if (accept(TokKind::Newline) || accept(TokKind::Indent) ||
          accept(TokKind::Dedent))
        continue;
      parse_statement_into(module);
    }
    finalize_origins();
    return std::move(tree_);
  }

private:
  // ---- token helpers -------------------------------------------------

  const Token &tok(int lookahead = 0) const {
    size_t i = std::min(pos_ + lookahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool at(TokKind kind) const { return tok().kind == kind; }
  bool at_op(std::string_view text) const {
    return tok().kind == TokKind::Op && tok().text == text;
  }
  bool at_name(std::string_view text) const {
    return tok().kind == TokKind::Name && tok().text == text;
  }
  bool at_identifier() const {
    return tok().kind == TokKind::Name && !kKeywords.count(tok().text);
  }

  const Token &advance() {
    const Token &t = tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_];
    if (t.kind == TokKind::Name || t.kind == TokKind::Number ||
        t.kind == TokKind::String || t.kind == TokKind::Op)
      last_real_end_ = t.span.end;
    return t;
  }

  bool accept(TokKind kind) {
    if (at(kind)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_op(std::string_view text) {
    if (at_op(text)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_name(std::string_view text) {
    if (at_name(text)) {
      advance();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = tok();
    throw ParseError(t.line, t.column,
                     msg + " (got '" + std::string(t.text) + "')");
  }

  void expect_op(std::string_view text) {
    if (!accept_op(text))
      fail("expected '" + std::string(text) + "'");
  }
  void expect_name(std::string_view text) {
    if (!accept_name(text))
      fail("expected '" + std::string(text) + "'");
  }
  void expect_newline() {
    if (!accept(TokKind::Newline) && !at(TokKind::End))
      fail("expected end of line");
  }

  uint32_t prev_end() const { return last_real_end_; }
  uint32_t cur_begin() const { return tok().span.begin; }

  void close(NodeId id, uint32_t begin) {
    tree_.at(id).span = {begin, prev_end()};
  }

  NodeId leaf(NodeKind kind, const Token &t) {
    return tree_.make_node(kind, std::string(t.text), t.span);
  }

  NodeId expect_identifier() {
    if (!at_identifier())
      fail("expected identifier");
    const Token &t = advance();
    return leaf(NodeKind::Name, t);
  }

  // ---- statements -----------------------------------------------------

  void parse_statement_into(NodeId block) {
    if (at(TokKind::Name)) {
      std::string_view kw = tok().text;
      if (kw == "if" || kw == "while" || kw == "for" || kw == "try" ||
          kw == "with" || kw == "def" || kw == "class" || kw == "async") {
        tree_.append_child(block, parse_compound());
        return;
      }
      if (kw == "elif" || kw == "else" || kw == "except" || kw == "finally")
        fail("unexpected '" + std::string(kw) + "'");
    }
    if (at_op("@")) {
      tree_.append_child(block, parse_compound());
      return;
    }
    parse_simple_line(block);
  }

  NodeId parse_compound() {
    uint32_t begin = cur_begin();
    std::vector<NodeId> decorators;
    while (at_op("@")) {
      uint32_t dbegin = cur_begin();
      advance();
      NodeId expr = parse_namedexpr();
      NodeId deco = tree_.make_node(NodeKind::Decorator, "");
      tree_.append_child(deco, expr);
      close(deco, dbegin);
      decorators.push_back(deco);
      expect_newline();
      while (accept(TokKind::Newline))
        ;
    }
    bool is_async = false;
    if (at_name("async")) {
      is_async = true;
      advance();
    }
    if (at_name("def"))
      return parse_def(begin, decorators, is_async);
    if (at_name("class"))
      return parse_class(begin, decorators);
    if (!decorators.empty())
      fail("expected 'def' or 'class' after decorators");
    if (at_name("for"))
      return parse_for(begin, is_async);
    if (at_name("with"))
      return parse_with(begin, is_async);
    if (is_async)
      fail("expected 'def', 'for' or 'with' after 'async'");
    if (at_name("if"))
      return parse_if(begin, "if");
    if (at_name("while"))
      return parse_while(begin);
    if (at_name("try"))
      return parse_try(begin);
    fail("expected statement");
  }

  NodeId parse_def(uint32_t begin, const std::vector<NodeId> &decorators,
                   bool is_async) {
    expect_name("def");
    NodeId def = tree_.make_node(NodeKind::FunctionDef, is_async ? "async" : "");
    for (NodeId deco : decorators)
      tree_.append_child(def, deco);
    tree_.append_child(def, expect_identifier());
    uint32_t pbegin = cur_begin();
    expect_op("(");
    NodeId params = parse_param_list();
    expect_op(")");
    close(params, pbegin);
    tree_.append_child(def, params);
    if (accept_op("->")) {
      uint32_t abegin = cur_begin();
      NodeId expr = parse_test();
      NodeId ann = tree_.make_node(NodeKind::Annotation, "");
      tree_.append_child(ann, expr);
      close(ann, abegin);
      tree_.append_child(def, ann);
    }
    tree_.append_child(def, parse_suite());
    close(def, begin);
    return def;
  }

  NodeId parse_param_list(bool allow_annotations = true) {
    NodeId params = tree_.make_node(NodeKind::Arguments, "");
    bool first = true;
    while (!at_op(")") && !at_op(":")) {
      if (!first)
        expect_op(",");
      first = false;
      if (at_op(")") || at_op(":"))
        break; // trailing comma
      uint32_t begin = cur_begin();
      std::string label;
      if (accept_op("**"))
        label = "**";
      else if (accept_op("*"))
        label = "*";
      else if (accept_op("/")) {
        NodeId param = tree_.make_node(NodeKind::Param, "/");
        close(param, begin);
        tree_.append_child(params, param);
        continue;
      }
      if (!at_identifier()) {
        if (label == "*") { // bare keyword-only marker
          NodeId param = tree_.make_node(NodeKind::Param, "*");
          close(param, begin);
          tree_.append_child(params, param);
          continue;
        }
        fail("expected parameter name");
      }
      label += std::string(advance().text);
      NodeId param = tree_.make_node(NodeKind::Param, label);
      if (allow_annotations && accept_op(":")) {
        uint32_t abegin = cur_begin();
        NodeId expr = parse_test();
        NodeId ann = tree_.make_node(NodeKind::Annotation, "");
        tree_.append_child(ann, expr);
        close(ann, abegin);
        tree_.append_child(param, ann);
      }
      if (accept_op("=")) {
        uint32_t dbegin = cur_begin();
        NodeId expr = parse_test();
        NodeId dfl = tree_.make_node(NodeKind::Default, "");
        tree_.append_child(dfl, expr);
        close(dfl, dbegin);
        tree_.append_child(param, dfl);
      }
      close(param, begin);
      tree_.append_child(params, param);
    }
    if (tree_.at(params).children.empty()) {
      uint32_t here = cur_begin();
      tree_.at(params).span = {here, here};
    } else {
      close(params, tree_.at(tree_.at(params).children.front()).span.begin);
    }
    return params;
  }

  NodeId parse_class(uint32_t begin, const std::vector<NodeId> &decorators) {
    expect_name("class");
    NodeId cls = tree_.make_node(NodeKind::ClassDef, "");
    for (NodeId deco : decorators)
      tree_.append_child(cls, deco);
    tree_.append_child(cls, expect_identifier());
    if (at_op("(")) {
      uint32_t abegin = cur_begin();
      advance();
      NodeId bases = parse_call_args();
      expect_op(")");
      close(bases, abegin);
      tree_.append_child(cls, bases);
    }
    tree_.append_child(cls, parse_suite());
    close(cls, begin);
    return cls;
  }

  NodeId parse_if(uint32_t begin, std::string_view kw) {
    expect_name(kw);
    NodeId node = tree_.make_node(NodeKind::IfStmt,
                                  kw == "elif" ? "elif" : "");
    tree_.append_child(node, parse_namedexpr());
    tree_.append_child(node, parse_suite());
    if (at_name("elif")) {
      tree_.append_child(node, parse_if(cur_begin(), "elif"));
    } else if (at_name("else")) {
      tree_.append_child(node, parse_else_clause());
    }
    close(node, begin);
    return node;
  }

  NodeId parse_else_clause() {
    uint32_t begin = cur_begin();
    expect_name("else");
    NodeId node = tree_.make_node(NodeKind::ElseClause, "");
    tree_.append_child(node, parse_suite());
    close(node, begin);
    return node;
  }

  NodeId parse_while(uint32_t begin) {
    expect_name("while");
    NodeId node = tree_.make_node(NodeKind::WhileStmt, "");
    tree_.append_child(node, parse_namedexpr());
    tree_.append_child(node, parse_suite());
    if (at_name("else"))
      tree_.append_child(node, parse_else_clause());
    close(node, begin);
    return node;
  }

  NodeId parse_for(uint32_t begin, bool is_async) {
    expect_name("for");
    NodeId node = tree_.make_node(NodeKind::ForStmt, is_async ? "async" : "");
    tree_.append_child(node, parse_target_list());
    expect_name("in");
    tree_.append_child(node, parse_testlist());
    tree_.append_child(node, parse_suite());
    if (at_name("else"))
      tree_.append_child(node, parse_else_clause());
    close(node, begin);
    return node;
  }

  NodeId parse_with(uint32_t begin, bool is_async) {
    expect_name("with");
    NodeId node = tree_.make_node(NodeKind::WithStmt, is_async ? "async" : "");
    do {
      uint32_t ibegin = cur_begin();
      NodeId item = tree_.make_node(NodeKind::WithItem, "");
      tree_.append_child(item, parse_test());
      if (accept_name("as"))
        tree_.append_child(item, parse_target());
      close(item, ibegin);
      tree_.append_child(node, item);
    } while (accept_op(","));
    tree_.append_child(node, parse_suite());
    close(node, begin);
    return node;
  }

  NodeId parse_try(uint32_t begin) {
    expect_name("try");
    NodeId node = tree_.make_node(NodeKind::TryStmt, "");
    tree_.append_child(node, parse_suite());
    bool saw_handler = false;
    while (at_name("except")) {
      saw_handler = true;
      uint32_t ebegin = cur_begin();
      advance();
      NodeId handler = tree_.make_node(NodeKind::ExceptClause, "");
      if (!at_op(":")) {
        tree_.append_child(handler, parse_test());
        if (accept_name("as"))
          tree_.append_child(handler, expect_identifier());
      }
      tree_.append_child(handler, parse_suite());
      close(handler, ebegin);
      tree_.append_child(node, handler);
    }
    if (at_name("else")) {
      if (!saw_handler)
        fail("'else' requires an 'except' clause");
      tree_.append_child(node, parse_else_clause());
    }
    if (at_name("finally")) {
      uint32_t fbegin = cur_begin();
      advance();
      NodeId fin = tree_.make_node(NodeKind::FinallyClause, "");
      tree_.append_child(fin, parse_suite());
      close(fin, fbegin);
      tree_.append_child(node, fin);
    } else if (!saw_handler) {
      fail("expected 'except' or 'finally'");
    }
    close(node, begin);
    return node;
  }

  NodeId parse_suite() {
    expect_op(":");
    NodeId block = tree_.make_node(NodeKind::Block, "");
    if (accept(TokKind::Newline)) {
      if (!accept(TokKind::Indent))
        fail("expected an indented block");
      while (!at(TokKind::Dedent) && !at(TokKind::End)) {
        if (accept(TokKind::Newline))
          continue;
        parse_statement_into(block);
      }
      accept(TokKind::Dedent);
    } else {
      parse_simple_line(block);
    }
    const auto &kids = tree_.at(block).children;
    if (kids.empty())
      fail("expected an indented block");
    tree_.at(block).span = {tree_.at(kids.front()).span.begin,
                            tree_.at(kids.back()).span.end};
    return block;
  }

  void parse_simple_line(NodeId block) {
    while (true) {
      tree_.append_child(block, parse_simple_stmt());
      if (accept_op(";")) {
        if (at(TokKind::Newline) || at(TokKind::End))
          break;
        continue;
      }
      break;
    }
    expect_newline();
  }

  NodeId parse_simple_stmt() {
    uint32_t begin = cur_begin();
    if (at(TokKind::Name)) {
      std::string_view kw = tok().text;
      if (kw == "pass" || kw == "break" || kw == "continue") {
        advance();
        NodeKind kind = kw == "pass"     ? NodeKind::PassStmt
                        : kw == "break" ? NodeKind::BreakStmt
                                        : NodeKind::ContinueStmt;
        NodeId node = tree_.make_node(kind, "");
        close(node, begin);
        return node;
      }
      if (kw == "return") {
        advance();
        NodeId node = tree_.make_node(NodeKind::ReturnStmt, "");
        if (!at(TokKind::Newline) && !at_op(";") && !at(TokKind::End))
          tree_.append_child(node, parse_testlist_star());
        close(node, begin);
        return node;
      }
      if (kw == "raise") {
        advance();
        NodeId node = tree_.make_node(NodeKind::RaiseStmt, "");
        if (!at(TokKind::Newline) && !at_op(";") && !at(TokKind::End)) {
          tree_.append_child(node, parse_test());
          if (accept_name("from")) {
            tree_.at(node).label = "from";
            tree_.append_child(node, parse_test());
          }
        }
        close(node, begin);
        return node;
      }
      if (kw == "del") {
        advance();
        NodeId node = tree_.make_node(NodeKind::DelStmt, "");
        do
          tree_.append_child(node, parse_target());
        while (accept_op(","));
        close(node, begin);
        return node;
      }
      if (kw == "assert") {
        advance();
        NodeId node = tree_.make_node(NodeKind::AssertStmt, "");
        tree_.append_child(node, parse_test());
        if (accept_op(","))
          tree_.append_child(node, parse_test());
        close(node, begin);
        return node;
      }
      if (kw == "global" || kw == "nonlocal") {
        advance();
        NodeId node = tree_.make_node(kw == "global" ? NodeKind::GlobalStmt
                                                     : NodeKind::NonlocalStmt,
                                      "");
        do
          tree_.append_child(node, expect_identifier());
        while (accept_op(","));
        close(node, begin);
        return node;
      }
      if (kw == "import")
        return parse_import(begin);
      if (kw == "from")
        return parse_import_from(begin);
      if (kw == "yield") {
        NodeId y = parse_yield_expr();
        NodeId node = tree_.make_node(NodeKind::ExprStmt, "");
        tree_.append_child(node, y);
        close(node, begin);
        return node;
      }
    }
    return parse_expr_statement(begin);
  }

  std::string parse_dotted_name() {
    std::string path;
    if (!at_identifier())
      fail("expected module name");
    path += std::string(advance().text);
    while (at_op(".") && tok(1).kind == TokKind::Name) {
      advance();
      path += ".";
      path += std::string(advance().text);
    }
    return path;
  }

  NodeId parse_import_alias(bool dotted) {
    uint32_t begin = cur_begin();
    std::string label;
    if (at_op("*")) {
      advance();
      label = "*";
    } else {
      label = dotted ? parse_dotted_name() : std::string(advance().text);
      if (accept_name("as")) {
        if (!at_identifier())
          fail("expected alias name");
        label += " as " + std::string(advance().text);
      }
    }
    NodeId node = tree_.make_node(NodeKind::ImportAlias, label);
    close(node, begin);
    return node;
  }

  NodeId parse_import(uint32_t begin) {
    expect_name("import");
    NodeId node = tree_.make_node(NodeKind::ImportStmt, "");
    do
      tree_.append_child(node, parse_import_alias(/*dotted=*/true));
    while (accept_op(","));
    close(node, begin);
    return node;
  }

  NodeId parse_import_from(uint32_t begin) {
    expect_name("from");
    std::string module;
    while (at_op(".") || at_op("...")) {
      module += std::string(advance().text);
    }
    if (at_identifier())
      module += parse_dotted_name();
    if (module.empty())
      fail("expected module after 'from'");
    expect_name("import");
    NodeId node = tree_.make_node(NodeKind::ImportFrom, module);
    bool parens = accept_op("(");
    do {
      if (parens && at_op(")"))
        break;
      if (!at_identifier() && !at_op("*"))
        fail("expected import name");
      tree_.append_child(node, parse_import_alias(/*dotted=*/false));
    } while (accept_op(","));
    if (parens)
      expect_op(")");
    close(node, begin);
    return node;
  }

  NodeId parse_expr_statement(uint32_t begin) {
    NodeId first = parse_testlist_star();
    if (at_op("=")) {
      NodeId node = tree_.make_node(NodeKind::Assign, "");
      tree_.append_child(node, first);
      while (accept_op("=")) {
        NodeId value = at_name("yield") ? parse_yield_expr()
                                        : parse_testlist_star();
        tree_.append_child(node, value);
      }
      close(node, begin);
      return node;
    }
    if (tok().kind == TokKind::Op && kAugOps.count(tok().text)) {
      std::string op(advance().text);
      NodeId node = tree_.make_node(NodeKind::AugAssign, op);
      tree_.append_child(node, first);
      NodeId value =
          at_name("yield") ? parse_yield_expr() : parse_testlist_star();
      tree_.append_child(node, value);
      close(node, begin);
      return node;
    }
    if (accept_op(":")) {
      NodeId node = tree_.make_node(NodeKind::AnnAssign, "");
      tree_.append_child(node, first);
      uint32_t abegin = cur_begin();
      NodeId expr = parse_test();
      NodeId ann = tree_.make_node(NodeKind::Annotation, "");
      tree_.append_child(ann, expr);
      close(ann, abegin);
      tree_.append_child(node, ann);
      if (accept_op("=")) {
        NodeId value =
            at_name("yield") ? parse_yield_expr() : parse_testlist_star();
        tree_.append_child(node, value);
      }
      close(node, begin);
      return node;
    }
    NodeId node = tree_.make_node(NodeKind::ExprStmt, "");
    tree_.append_child(node, first);
    close(node, begin);
    return node;
  }

  // ---- expressions ----------------------------------------------------

  NodeId parse_target() { return parse_or_expr_chainable(); }

  NodeId parse_target_list() {
    uint32_t begin = cur_begin();
    NodeId first = parse_target_item();
    if (!at_op(","))
      return first;
    NodeId tuple = tree_.make_node(NodeKind::TupleExpr, "");
    tree_.append_child(tuple, first);
    while (accept_op(",")) {
      if (at_name("in") || at_op("=") || at(TokKind::Newline) || at_op(":"))
        break;
      tree_.append_child(tuple, parse_target_item());
    }
    close(tuple, begin);
    return tuple;
  }

  NodeId parse_target_item() {
    if (at_op("*")) {
      uint32_t begin = cur_begin();
      advance();
      NodeId star = tree_.make_node(NodeKind::Starred, "*");
      tree_.append_child(star, parse_target());
      close(star, begin);
      return star;
    }
    return parse_target();
  }

  // Postfix-only expression used for assignment/del targets.
  NodeId parse_or_expr_chainable() { return parse_bitor(); }

  NodeId parse_yield_expr() {
    uint32_t begin = cur_begin();
    expect_name("yield");
    if (accept_name("from")) {
      NodeId node = tree_.make_node(NodeKind::Yield, "yield from");
      tree_.append_child(node, parse_test());
      close(node, begin);
      return node;
    }
    NodeId node = tree_.make_node(NodeKind::Yield, "yield");
    if (!at(TokKind::Newline) && !at_op(")") && !at_op("]") && !at_op("}") &&
        !at_op(";") && !at(TokKind::End) && !at_op(","))
      tree_.append_child(node, parse_testlist_star());
    close(node, begin);
    return node;
  }

  NodeId parse_testlist_star() {
    uint32_t begin = cur_begin();
    NodeId first = at_op("*") ? parse_target_item() : parse_namedexpr();
    if (!at_op(","))
      return first;
    NodeId tuple = tree_.make_node(NodeKind::TupleExpr, "");
    tree_.append_child(tuple, first);
    bool trailing = false;
    while (accept_op(",")) {
      if (at(TokKind::Newline) || at_op("=") || at_op(")") || at_op("]") ||
          at_op("}") || at_op(":") || at_op(";") || at(TokKind::End) ||
          (tok().kind == TokKind::Op && kAugOps.count(tok().text))) {
        trailing = true;
        break;
      }
      tree_.append_child(tuple, at_op("*") ? parse_target_item()
                                           : parse_namedexpr());
    }
    (void)trailing;
    close(tuple, begin);
    return tuple;
  }

  NodeId parse_testlist() {
    uint32_t begin = cur_begin();
    NodeId first = parse_test();
    if (!at_op(","))
      return first;
    NodeId tuple = tree_.make_node(NodeKind::TupleExpr, "");
    tree_.append_child(tuple, first);
    while (accept_op(",")) {
      if (at_op(":") || at(TokKind::Newline) || at(TokKind::End))
        break;
      tree_.append_child(tuple, parse_test());
    }
    close(tuple, begin);
    return tuple;
  }

  NodeId parse_namedexpr() {
    uint32_t begin = cur_begin();
    NodeId expr = parse_test();
    if (at_op(":=")) {
      advance();
      NodeId node = tree_.make_node(NodeKind::NamedExpr, ":=");
      tree_.append_child(node, expr);
      tree_.append_child(node, parse_test());
      close(node, begin);
      return node;
    }
    return expr;
  }

  NodeId parse_test() {
    if (at_name("lambda"))
      return parse_lambda();
    uint32_t begin = cur_begin();
    NodeId body = parse_or_test();
    if (at_name("if")) {
      advance();
      NodeId cond = parse_or_test();
      expect_name("else");
      NodeId orelse = parse_test();
      NodeId node = tree_.make_node(NodeKind::IfExp, "");
      tree_.append_child(node, body);
      tree_.append_child(node, cond);
      tree_.append_child(node, orelse);
      close(node, begin);
      return node;
    }
    return body;
  }

  NodeId parse_lambda() {
    uint32_t begin = cur_begin();
    expect_name("lambda");
    NodeId params = parse_param_list(/*allow_annotations=*/false);
    expect_op(":");
    NodeId body = parse_test();
    NodeId node = tree_.make_node(NodeKind::Lambda, "");
    tree_.append_child(node, params);
    tree_.append_child(node, body);
    close(node, begin);
    return node;
  }

  NodeId parse_or_test() {
    uint32_t begin = cur_begin();
    NodeId first = parse_and_test();
    if (!at_name("or"))
      return first;
    NodeId node = tree_.make_node(NodeKind::BoolOp, "or");
    tree_.append_child(node, first);
    while (accept_name("or"))
      tree_.append_child(node, parse_and_test());
    close(node, begin);
    return node;
  }

  NodeId parse_and_test() {
    uint32_t begin = cur_begin();
    NodeId first = parse_not_test();
    if (!at_name("and"))
      return first;
    NodeId node = tree_.make_node(NodeKind::BoolOp, "and");
    tree_.append_child(node, first);
    while (accept_name("and"))
      tree_.append_child(node, parse_not_test());
    close(node, begin);
    return node;
  }

  NodeId parse_not_test() {
    if (at_name("not")) {
      uint32_t begin = cur_begin();
      advance();
      NodeId node = tree_.make_node(NodeKind::UnaryOp, "not");
      tree_.append_child(node, parse_not_test());
      close(node, begin);
      return node;
    }
    return parse_comparison();
  }

  NodeId parse_comparison() {
    uint32_t begin = cur_begin();
    NodeId first = parse_bitor();
    std::vector<std::string> ops;
    std::vector<NodeId> operands;
    while (true) {
      std::string op;
      if (at_op("<") || at_op(">") || at_op("==") || at_op("!=") ||
          at_op("<=") || at_op(">=")) {
        op = std::string(advance().text);
      } else if (at_name("in")) {
        advance();
        op = "in";
      } else if (at_name("not") && tok(1).kind == TokKind::Name &&
                 tok(1).text == "in") {
        advance();
        advance();
        op = "not in";
      } else if (at_name("is")) {
        advance();
        if (accept_name("not"))
          op = "is not";
        else
          op = "is";
      } else {
        break;
      }
      ops.push_back(op);
      operands.push_back(parse_bitor());
    }
    if (ops.empty())
      return first;
    // Chained comparators join with ';' ("is not"/"not in" contain spaces).
    std::string label;
    for (size_t i = 0; i < ops.size(); ++i)
      label += (i ? ";" : "") + ops[i];
    NodeId node = tree_.make_node(NodeKind::Compare, label);
    tree_.append_child(node, first);
    for (NodeId operand : operands)
      tree_.append_child(node, operand);
    close(node, begin);
    return node;
  }

  NodeId parse_binop_level(const std::vector<std::string_view> &ops,
                           NodeId (Parser::*next)()) {
    uint32_t begin = cur_begin();
    NodeId left = (this->*next)();
    while (true) {
      bool matched = false;
      for (std::string_view op : ops) {
        if (at_op(op)) {
          advance();
          NodeId right = (this->*next)();
          NodeId node = tree_.make_node(NodeKind::BinOp, std::string(op));
          tree_.append_child(node, left);
          tree_.append_child(node, right);
          close(node, begin);
          left = node;
          matched = true;
          break;
        }
      }
      if (!matched)
        return left;
    }
  }

  NodeId parse_bitor() { return parse_binop_level({"|"}, &Parser::parse_bitxor); }
  NodeId parse_bitxor() { return parse_binop_level({"^"}, &Parser::parse_bitand); }
  NodeId parse_bitand() { return parse_binop_level({"&"}, &Parser::parse_shift); }
  NodeId parse_shift() {
    return parse_binop_level({"<<", ">>"}, &Parser::parse_arith);
  }
  NodeId parse_arith() {
    return parse_binop_level({"+", "-"}, &Parser::parse_term);
  }
  NodeId parse_term() {
    return parse_binop_level({"*", "@", "/", "%", "//"}, &Parser::parse_factor);
  }

  NodeId parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      uint32_t begin = cur_begin();
      std::string op(advance().text);
      NodeId node = tree_.make_node(NodeKind::UnaryOp, op);
      tree_.append_child(node, parse_factor());
      close(node, begin);
      return node;
    }
    return parse_power();
  }

  NodeId parse_power() {
    uint32_t begin = cur_begin();
    NodeId base = parse_await_primary();
    if (at_op("**")) {
      advance();
      NodeId exp = parse_factor();
      NodeId node = tree_.make_node(NodeKind::BinOp, "**");
      tree_.append_child(node, base);
      tree_.append_child(node, exp);
      close(node, begin);
      return node;
    }
    return base;
  }

  NodeId parse_await_primary() {
    if (at_name("await")) {
      uint32_t begin = cur_begin();
      advance();
      NodeId node = tree_.make_node(NodeKind::Await, "");
      tree_.append_child(node, parse_await_primary());
      close(node, begin);
      return node;
    }
    return parse_primary();
  }

  NodeId parse_primary() {
    uint32_t begin = cur_begin();
    NodeId node = parse_atom();
    while (true) {
      if (at_op(".") && tok(1).kind == TokKind::Name) {
        advance();
        const Token &name = advance();
        NodeId attr = tree_.make_node(NodeKind::Attribute,
                                      std::string(name.text));
        tree_.append_child(attr, node);
        close(attr, begin);
        node = attr;
      } else if (at_op("(")) {
        uint32_t abegin = cur_begin();
        advance();
        NodeId args = parse_call_args();
        expect_op(")");
        close(args, abegin);
        NodeId call = tree_.make_node(NodeKind::Call, "");
        tree_.append_child(call, node);
        tree_.append_child(call, args);
        close(call, begin);
        node = call;
      } else if (at_op("[")) {
        advance();
        NodeId index = parse_subscript_index();
        expect_op("]");
        NodeId sub = tree_.make_node(NodeKind::Subscript, "");
        tree_.append_child(sub, node);
        tree_.append_child(sub, index);
        close(sub, begin);
        node = sub;
      } else {
        return node;
      }
    }
  }

  NodeId parse_call_args() {
    NodeId args = tree_.make_node(NodeKind::Arguments, "");
    bool first = true;
    while (!at_op(")")) {
      if (!first)
        expect_op(",");
      first = false;
      if (at_op(")"))
        break; // trailing comma
      uint32_t begin = cur_begin();
      if (accept_op("*")) {
        NodeId star = tree_.make_node(NodeKind::Starred, "*");
        tree_.append_child(star, parse_test());
        close(star, begin);
        tree_.append_child(args, star);
        continue;
      }
      if (accept_op("**")) {
        NodeId kw = tree_.make_node(NodeKind::KeywordArg, "**");
        tree_.append_child(kw, parse_test());
        close(kw, begin);
        tree_.append_child(args, kw);
        continue;
      }
      if (at_identifier() && tok(1).kind == TokKind::Op &&
          tok(1).text == "=") {
        std::string name(advance().text);
        advance(); // '='
        NodeId kw = tree_.make_node(NodeKind::KeywordArg, name);
        tree_.append_child(kw, parse_test());
        close(kw, begin);
        tree_.append_child(args, kw);
        continue;
      }
      NodeId expr = parse_namedexpr();
      if (at_name("for") || at_name("async")) {
        NodeId gen = tree_.make_node(NodeKind::GeneratorExp, "");
        tree_.append_child(gen, expr);
        parse_comp_clauses(gen);
        close(gen, begin);
        expr = gen;
      }
      tree_.append_child(args, expr);
    }
    return args;
  }

  NodeId parse_subscript_index() {
    uint32_t begin = cur_begin();
    NodeId first = parse_slice_item();
    if (!at_op(","))
      return first;
    NodeId tuple = tree_.make_node(NodeKind::TupleExpr, "");
    tree_.append_child(tuple, first);
    while (accept_op(",")) {
      if (at_op("]"))
        break;
      tree_.append_child(tuple, parse_slice_item());
    }
    close(tuple, begin);
    return tuple;
  }

  NodeId parse_slice_item() {
    uint32_t begin = cur_begin();
    NodeId lower = kNoNode;
    if (!at_op(":"))
      lower = parse_test();
    if (!at_op(":")) {
      if (lower == kNoNode)
        fail("expected expression in subscript");
      return lower;
    }
    advance(); // first ':'
    std::string mask = lower != kNoNode ? "l:" : ":";
    NodeId upper = kNoNode;
    if (!at_op(":") && !at_op("]") && !at_op(","))
      upper = parse_test();
    if (upper != kNoNode)
      mask += "u";
    NodeId step = kNoNode;
    if (accept_op(":")) {
      mask += ":";
      if (!at_op("]") && !at_op(","))
        step = parse_test();
      if (step != kNoNode)
        mask += "s";
    }
    NodeId node = tree_.make_node(NodeKind::Slice, mask);
    if (lower != kNoNode)
      tree_.append_child(node, lower);
    if (upper != kNoNode)
      tree_.append_child(node, upper);
    if (step != kNoNode)
      tree_.append_child(node, step);
    close(node, begin);
    return node;
  }

  void parse_comp_clauses(NodeId parent) {
    while (true) {
      if (at_name("async") && tok(1).kind == TokKind::Name &&
          tok(1).text == "for") {
        uint32_t begin = cur_begin();
        advance();
        advance();
        parse_comp_for_body(parent, begin, "async");
      } else if (at_name("for")) {
        uint32_t begin = cur_begin();
        advance();
        parse_comp_for_body(parent, begin, "");
      } else {
        return;
      }
    }
  }

  void parse_comp_for_body(NodeId parent, uint32_t begin,
                           std::string label) {
    NodeId comp = tree_.make_node(NodeKind::CompFor, std::move(label));
    tree_.append_child(comp, parse_target_list());
    expect_name("in");
    tree_.append_child(comp, parse_or_test());
    while (at_name("if")) {
      uint32_t ibegin = cur_begin();
      advance();
      NodeId cond = tree_.make_node(NodeKind::CompIf, "");
      tree_.append_child(cond, parse_or_test());
      close(cond, ibegin);
      tree_.append_child(comp, cond);
    }
    close(comp, begin);
    tree_.append_child(parent, comp);
  }

  NodeId parse_atom() {
    const Token &t = tok();
    if (t.kind == TokKind::Number) {
      advance();
      return leaf(NodeKind::Literal, t);
    }
    if (t.kind == TokKind::String) {
      uint32_t begin = t.span.begin;
      // Adjacent string literals become one token; the label joins the
      // pieces on one line so the pretty-printer output stays parseable.
      std::string label(advance().text);
      uint32_t end = prev_end();
      while (at(TokKind::String)) {
        label += " ";
        label += std::string(advance().text);
        end = prev_end();
      }
      return tree_.make_node(NodeKind::Literal, std::move(label),
                             {begin, end});
    }
    if (t.kind == TokKind::Name) {
      if (t.text == "True" || t.text == "False" || t.text == "None") {
        advance();
        return leaf(NodeKind::Literal, t);
      }
      if (t.text == "lambda")
        return parse_lambda();
      if (t.text == "yield")
        return parse_yield_expr();
      if (t.text == "await")
        return parse_await_primary();
      if (kKeywords.count(t.text))
        fail("unexpected keyword '" + std::string(t.text) + "'");
      advance();
      return leaf(NodeKind::Name, t);
    }
    if (at_op("...")) {
      advance();
      return leaf(NodeKind::Literal, t);
    }
    if (at_op("("))
      return parse_paren_atom();
    if (at_op("["))
      return parse_list_atom();
    if (at_op("{"))
      return parse_brace_atom();
    fail("expected expression");
  }

  NodeId parse_paren_atom() {
    uint32_t begin = cur_begin();
    expect_op("(");
    if (accept_op(")")) {
      NodeId node = tree_.make_node(NodeKind::TupleExpr, "");
      close(node, begin);
      return node;
    }
    if (at_name("yield")) {
      NodeId node = parse_yield_expr();
      expect_op(")");
      return node;
    }
    NodeId first = at_op("*") ? parse_target_item() : parse_namedexpr();
    if (at_name("for") || (at_name("async") && tok(1).kind == TokKind::Name &&
                           tok(1).text == "for")) {
      NodeId gen = tree_.make_node(NodeKind::GeneratorExp, "");
      tree_.append_child(gen, first);
      parse_comp_clauses(gen);
      expect_op(")");
      close(gen, begin);
      return gen;
    }
    if (at_op(",")) {
      NodeId tuple = tree_.make_node(NodeKind::TupleExpr, "");
      tree_.append_child(tuple, first);
      while (accept_op(",")) {
        if (at_op(")"))
          break;
        tree_.append_child(tuple, at_op("*") ? parse_target_item()
                                             : parse_namedexpr());
      }
      expect_op(")");
      close(tuple, begin);
      return tuple;
    }
    expect_op(")");
    return first; // parentheses are transparent
  }

  NodeId parse_list_atom() {
    uint32_t begin = cur_begin();
    expect_op("[");
    if (accept_op("]")) {
      NodeId node = tree_.make_node(NodeKind::ListExpr, "");
      close(node, begin);
      return node;
    }
    NodeId first = at_op("*") ? parse_target_item() : parse_namedexpr();
    if (at_name("for") || (at_name("async") && tok(1).kind == TokKind::Name &&
                           tok(1).text == "for")) {
      NodeId comp = tree_.make_node(NodeKind::ListComp, "");
      tree_.append_child(comp, first);
      parse_comp_clauses(comp);
      expect_op("]");
      close(comp, begin);
      return comp;
    }
    NodeId list = tree_.make_node(NodeKind::ListExpr, "");
    tree_.append_child(list, first);
    while (accept_op(",")) {
      if (at_op("]"))
        break;
      tree_.append_child(list, at_op("*") ? parse_target_item()
                                          : parse_namedexpr());
    }
    expect_op("]");
    close(list, begin);
    return list;
  }

  NodeId parse_brace_atom() {
    uint32_t begin = cur_begin();
    expect_op("{");
    if (accept_op("}")) {
      NodeId node = tree_.make_node(NodeKind::DictExpr, "");
      close(node, begin);
      return node;
    }
    if (at_op("**")) {
      NodeId dict = tree_.make_node(NodeKind::DictExpr, "");
      parse_one_dict_item(dict);
      parse_dict_tail(dict);
      expect_op("}");
      close(dict, begin);
      return dict;
    }
    NodeId first = at_op("*") ? parse_target_item() : parse_namedexpr();
    if (at_op(":")) { // dict
      advance();
      uint32_t ibegin = tree_.at(first).span.begin;
      NodeId value = parse_test();
      NodeId item = tree_.make_node(NodeKind::DictItem, "");
      tree_.append_child(item, first);
      tree_.append_child(item, value);
      close(item, ibegin);
      if (at_name("for") ||
          (at_name("async") && tok(1).kind == TokKind::Name &&
           tok(1).text == "for")) {
        NodeId comp = tree_.make_node(NodeKind::DictComp, "");
        tree_.append_child(comp, item);
        parse_comp_clauses(comp);
        expect_op("}");
        close(comp, begin);
        return comp;
      }
      NodeId dict = tree_.make_node(NodeKind::DictExpr, "");
      tree_.append_child(dict, item);
      parse_dict_tail(dict);
      expect_op("}");
      close(dict, begin);
      return dict;
    }
    if (at_name("for") || (at_name("async") && tok(1).kind == TokKind::Name &&
                           tok(1).text == "for")) {
      NodeId comp = tree_.make_node(NodeKind::SetComp, "");
      tree_.append_child(comp, first);
      parse_comp_clauses(comp);
      expect_op("}");
      close(comp, begin);
      return comp;
    }
    NodeId set = tree_.make_node(NodeKind::SetExpr, "");
    tree_.append_child(set, first);
    while (accept_op(",")) {
      if (at_op("}"))
        break;
      tree_.append_child(set, at_op("*") ? parse_target_item()
                                         : parse_namedexpr());
    }
    expect_op("}");
    close(set, begin);
    return set;
  }

  void parse_one_dict_item(NodeId dict) {
    uint32_t begin = cur_begin();
    if (accept_op("**")) {
      NodeId item = tree_.make_node(NodeKind::DictItem, "**");
      tree_.append_child(item, parse_bitor());
      close(item, begin);
      tree_.append_child(dict, item);
      return;
    }
    NodeId key = parse_test();
    expect_op(":");
    NodeId value = parse_test();
    NodeId item = tree_.make_node(NodeKind::DictItem, "");
    tree_.append_child(item, key);
    tree_.append_child(item, value);
    close(item, begin);
    tree_.append_child(dict, item);
  }

  // Consumes the remaining `, item` sequence of a dict display.
  void parse_dict_tail(NodeId dict) {
    while (accept_op(",")) {
      if (at_op("}"))
        return;
      parse_one_dict_item(dict);
    }
  }

  // Records parse-time state used by render() to splice original bytes.
  void finalize_origins() {
    for (SyntaxNode &node : tree_.nodes) {
      node.from_source = true;
      node.orig_label = node.label;
      node.orig_children = node.children;
    }
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  uint32_t last_real_end_ = 0;
  SyntaxTree tree_;
};

} // namespace

SyntaxTree parse_source(std::string_view source) {
  return Parser(source).run();
}

} // namespace pdgfix
