#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdgfix/syntax.hpp"
#include "pdgfix/treediff.hpp"

using namespace pdgfix;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> files;
  for (const auto &entry :
       fs::recursive_directory_iterator(PDGFIX_CORPUS_DIR))
    if (entry.is_regular_file() && entry.path().extension() == ".py")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

} // namespace

TEST_CASE("minimal function parses") {
  SyntaxTree tree = parse_source("def f():\n    pass\n");
  std::vector<FunctionUnit> units = function_units(tree);
  REQUIRE(units.size() == 1);
  CHECK(units[0].qualified_name == "f");
  const SyntaxNode &def = tree.at(units[0].node);
  CHECK(def.kind == NodeKind::FunctionDef);
  // one pass statement in the body
  NodeId block = def.children.back();
  REQUIRE(tree.at(block).kind == NodeKind::Block);
  REQUIRE(tree.at(block).children.size() == 1);
  CHECK(tree.at(tree.at(block).children[0]).kind == NodeKind::PassStmt);
}

TEST_CASE("empty input gives an empty module") {
  SyntaxTree tree = parse_source("");
  CHECK(tree.at(tree.root).kind == NodeKind::Module);
  CHECK(tree.at(tree.root).children.empty());
  CHECK(function_units(tree).empty());
}

TEST_CASE("malformed input reports the offending line") {
  try {
    parse_source("def f(:\n");
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(e.line == 1);
  }
}

TEST_CASE("function units cover methods and nested defs in source order") {
  std::string source = "def a():\n"
                       "    def inner():\n"
                       "        pass\n"
                       "    return inner\n"
                       "\n"
                       "class Box:\n"
                       "    def get(self):\n"
                       "        return self.v\n";
  SyntaxTree tree = parse_source(source);
  std::vector<FunctionUnit> units = function_units(tree);
  REQUIRE(units.size() == 3);
  CHECK(units[0].qualified_name == "a");
  CHECK(units[1].qualified_name == "a.inner");
  CHECK(units[2].qualified_name == "Box.get");
}

TEST_CASE("module with no defs yields no units") {
  SyntaxTree tree = parse_source("x = 1\nprint(x)\n");
  CHECK(function_units(tree).empty());
}

TEST_CASE("zero-edit render is byte identical") {
  std::string source = "x = 1  # comment\n\n\ndef f(a, b=2):\n"
                       "    return a + b\n";
  SyntaxTree tree = parse_source(source);
  CHECK(render(tree, source, {}) == source);
}

TEST_CASE("round-trip over the corpus") {
  for (const fs::path &file : corpus_files()) {
    std::string source = slurp(file);
    SyntaxTree tree;
    try {
      tree = parse_source(source);
    } catch (const ParseError &) {
      continue; // negative corpus entries that do not parse are fine here
    }
    INFO(file.string());
    CHECK(render(tree, source, {}) == source);
  }
}

TEST_CASE("re-parse stability of the pretty printer over the corpus") {
  for (const fs::path &file : corpus_files()) {
    std::string source = slurp(file);
    SyntaxTree tree;
    try {
      tree = parse_source(source);
    } catch (const ParseError &) {
      continue;
    }
    INFO(file.string());
    std::string printed = pretty_print(tree, tree.root);
    SyntaxTree reparsed = parse_source(printed);
    CHECK(structural_equal(tree, reparsed));
  }
}

TEST_CASE("span containment and ordering invariants") {
  for (const fs::path &file : corpus_files()) {
    std::string source = slurp(file);
    SyntaxTree tree;
    try {
      tree = parse_source(source);
    } catch (const ParseError &) {
      continue;
    }
    INFO(file.string());
    for (const SyntaxNode &node : tree.nodes) {
      uint32_t cursor = node.span.begin;
      for (NodeId child : node.children) {
        const Span &cs = tree.at(child).span;
        CHECK(node.span.contains(cs));
        CHECK(cs.begin >= cursor);
        cursor = cs.end;
      }
      if (node.kind == NodeKind::Name || node.kind == NodeKind::Literal)
        CHECK(node.children.empty());
    }
  }
}

TEST_CASE("update of one identifier touches only that token") {
  std::string source = "def f(data):\n"
                       "    total = 0\n"
                       "    for i in range(3):  # loop\n"
                       "        total += i\n"
                       "    return total\n";
  SyntaxTree tree = parse_source(source);
  NodeId target = kNoNode;
  for (const SyntaxNode &node : tree.nodes)
    if (node.kind == NodeKind::Name && node.label == "i" &&
        tree.at(node.parent).kind == NodeKind::ForStmt)
      target = node.id;
  REQUIRE(target != kNoNode);

  EditAction update;
  update.op = EditOp::Update;
  update.target = NodeRef::existing(target);
  update.label = "idx";
  ApplyResult applied = apply_edit_script(tree, {update});
  std::string out = render(applied.tree, source, applied.touched);
  CHECK(out == "def f(data):\n"
               "    total = 0\n"
               "    for idx in range(3):  # loop\n"
               "        total += i\n"
               "    return total\n");
}

TEST_CASE("deleting one statement keeps its siblings byte-identical") {
  std::string source = "def f():\n"
                       "    a = 1   # first\n"
                       "    b = 2   # second\n"
                       "    c = 3   # third\n";
  SyntaxTree tree = parse_source(source);
  // delete `b = 2`
  NodeId target = kNoNode;
  for (const SyntaxNode &node : tree.nodes)
    if (node.kind == NodeKind::Assign &&
        tree.text_of(node.id).substr(0, 1) == "b")
      target = node.id;
  REQUIRE(target != kNoNode);
  EditAction del;
  del.op = EditOp::Delete;
  del.target = NodeRef::existing(target);
  ApplyResult applied = apply_edit_script(tree, {del});
  std::string out = render(applied.tree, source, applied.touched);
  CHECK(out == "def f():\n"
               "    a = 1   # first\n"
               "    c = 3   # third\n");
}

TEST_CASE("render after editing re-parses structurally equal") {
  std::string source = "def f(xs):\n"
                       "    out = []\n"
                       "    for x in xs:\n"
                       "        out.append(x * 2)\n"
                       "    return out\n";
  SyntaxTree tree = parse_source(source);
  NodeId x_use = kNoNode;
  for (const SyntaxNode &node : tree.nodes)
    if (node.kind == NodeKind::Name && node.label == "x" &&
        tree.at(node.parent).kind == NodeKind::BinOp)
      x_use = node.id;
  REQUIRE(x_use != kNoNode);
  EditAction update;
  update.op = EditOp::Update;
  update.target = NodeRef::existing(x_use);
  update.label = "value";
  ApplyResult applied = apply_edit_script(tree, {update});
  std::string out = render(applied.tree, source, applied.touched);
  SyntaxTree reparsed = parse_source(out);
  CHECK(structural_equal(applied.tree, reparsed));
}

TEST_CASE("grammar coverage smoke checks") {
  const char *snippets[] = {
      "async def g(x, *args, k=1, **kw):\n    await x\n",
      "with open('f') as fh, lock:\n    fh.read()\n",
      "try:\n    x = 1 / 0\nexcept ZeroDivisionError as e:\n    raise\n"
      "else:\n    pass\nfinally:\n    done()\n",
      "xs = [i * j for i in range(3) for j in range(4) if i != j]\n",
      "d = {k: v for k, v in pairs}\n",
      "s = {1, 2, 3}\n",
      "t = 1, 2, 3\n",
      "a, *rest = [1, 2, 3]\n",
      "f = lambda a, b=2: a + b\n",
      "y = x if x > 0 else -x\n",
      "global counter\n",
      "del d['k']\n",
      "assert x == 1, 'boom'\n",
      "from os.path import join as j, exists\n",
      "import os.path, sys\n",
      "print(*args, sep=', ', **kw)\n",
      "m = a[1:2, ::3]\n",
      "z = (yield)\n",
      "n = f'{a} and {b!r}'\n",
      "q = x @ y ** -z\n",
      "if (n := len(xs)) > 3:\n    pass\n",
      "@decorator(arg)\nclass C(Base, meta=M):\n    attr: int = 0\n",
      "def h() -> 'int':\n    return 0\n",
      "while chunk := read():\n    use(chunk)\n",
      "b = rb'\\x00' b'more'\n",
      "s = ('implicit'\n     'concat')\n",
      "x = 0o17 + 0xFF + 0b101 + 1_000_000 + 3.14e-2 + 2j\n",
  };
  for (const char *snippet : snippets) {
    INFO(snippet);
    SyntaxTree tree = parse_source(snippet);
    CHECK(render(tree, snippet, {}) == snippet);
    SyntaxTree reparsed = parse_source(pretty_print(tree, tree.root));
    CHECK(structural_equal(tree, reparsed));
  }
}
