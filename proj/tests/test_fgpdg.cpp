#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "pdgfix/fgpdg.hpp"
#include "support.hpp"

using namespace pdgfix;
using testsupport::corpus_files;
using testsupport::slurp;

namespace {

struct Built {
  std::shared_ptr<SyntaxTree> tree;
  Pdg pdg;
};

Built build(const std::string &source) {
  Built b;
  b.tree = std::make_shared<SyntaxTree>(parse_source(source));
  std::vector<FunctionUnit> units = function_units(*b.tree);
  NodeId unit = units.empty() ? b.tree->root : units.front().node;
  b.pdg = build_fgpdg(*b.tree, unit);
  return b;
}

int find_vertex(const Pdg &pdg, PdgKind kind, const std::string &label) {
  for (const PdgNode &v : pdg.vertices)
    if (v.kind == kind && v.label == label)
      return v.id;
  return -1;
}

bool has_edge(const Pdg &pdg, int src, int dst, PdgEdgeLabel label) {
  for (const PdgEdge &e : pdg.edges)
    if (e.src == src && e.dst == dst && e.label == label)
      return true;
  return false;
}

// Path existence along edge direction.
bool has_path(const Pdg &pdg, int from, int to) {
  std::set<int> seen{from};
  std::vector<int> stack{from};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    if (cur == to)
      return true;
    for (const PdgEdge &e : pdg.edges)
      if (e.src == cur && !seen.count(e.dst)) {
        seen.insert(e.dst);
        stack.push_back(e.dst);
      }
  }
  return false;
}

} // namespace

TEST_CASE("x = 1 builds literal -para-> assign -def-> variable") {
  Built b = build("def f():\n    x = 1\n");
  int lit = find_vertex(b.pdg, PdgKind::Data, "1");
  int assign = find_vertex(b.pdg, PdgKind::Operation, "=");
  int var = find_vertex(b.pdg, PdgKind::Data, "x");
  REQUIRE(lit >= 0);
  REQUIRE(assign >= 0);
  REQUIRE(var >= 0);
  CHECK(b.pdg.vertices.size() == 3);
  CHECK(has_edge(b.pdg, lit, assign, PdgEdgeLabel::Para));
  CHECK(has_edge(b.pdg, assign, var, PdgEdgeLabel::Def));
}

TEST_CASE("pass contributes nothing") {
  Built b = build("def f():\n    pass\n");
  CHECK(b.pdg.vertices.empty());
  CHECK(b.pdg.edges.empty());
}

TEST_CASE("one merged data vertex per variable across def and uses") {
  Built b = build("def walk():\n"
                  "    data = [1, 2]\n"
                  "    for i in range(len(data)):\n"
                  "        data[i]\n");
  int data = find_vertex(b.pdg, PdgKind::Data, "data");
  REQUIRE(data >= 0);
  int count = 0;
  for (const PdgNode &v : b.pdg.vertices)
    if (v.kind == PdgKind::Data && v.label == "data")
      ++count;
  CHECK(count == 1);
  CHECK(b.pdg.vertex(data).syntax_refs.size() == 3); // def + two uses

  int assign = find_vertex(b.pdg, PdgKind::Operation, "=");
  int ctrl = find_vertex(b.pdg, PdgKind::Control, "for");
  REQUIRE(assign >= 0);
  REQUIRE(ctrl >= 0);
  CHECK(has_edge(b.pdg, assign, data, PdgEdgeLabel::Def));
  int subload = -1;
  for (const PdgNode &v : b.pdg.vertices)
    if (v.subkind == PdgSubkind::SubscriptLoad)
      subload = v.id;
  REQUIRE(subload >= 0);
  // def site connects to the later use through the shared vertex
  CHECK(has_path(b.pdg, assign, subload));
  // control vertex has dep edges into the body
  CHECK(has_edge(b.pdg, ctrl, subload, PdgEdgeLabel::Dep));
}

TEST_CASE("def-use soundness on straight-line code") {
  Built b = build("def f():\n    a = g()\n    h(a)\n");
  int var = find_vertex(b.pdg, PdgKind::Data, "a");
  int assign = find_vertex(b.pdg, PdgKind::Operation, "=");
  REQUIRE(var >= 0);
  REQUIRE(assign >= 0);
  int h_call = -1;
  for (const PdgNode &v : b.pdg.vertices)
    if (v.subkind == PdgSubkind::FunctionRef && v.label == "h")
      for (const PdgEdge &e : b.pdg.edges)
        if (e.src == v.id && e.label == PdgEdgeLabel::Recv)
          h_call = e.dst;
  REQUIRE(h_call >= 0);
  CHECK(has_path(b.pdg, assign, h_call));
}

TEST_CASE("branch-join defs both reach a later use") {
  Built b = build("def f(c):\n"
                  "    if c:\n"
                  "        x = 1\n"
                  "    else:\n"
                  "        x = 2\n"
                  "    return g(x)\n");
  int var = find_vertex(b.pdg, PdgKind::Data, "x");
  REQUIRE(var >= 0);
  int defs = 0;
  for (const PdgEdge &e : b.pdg.edges)
    if (e.dst == var && e.label == PdgEdgeLabel::Def)
      ++defs;
  CHECK(defs == 2);
  int uses = 0;
  for (const PdgEdge &e : b.pdg.edges)
    if (e.src == var && e.label == PdgEdgeLabel::Para)
      ++uses;
  CHECK(uses == 1);
}

TEST_CASE("attribute chains collapse with a qual edge from the root") {
  Built b = build("def f(np, x):\n    y = np.log(x)\n");
  int fref = find_vertex(b.pdg, PdgKind::Data, "np.log");
  int root = find_vertex(b.pdg, PdgKind::Data, "np");
  REQUIRE(fref >= 0);
  REQUIRE(root >= 0);
  CHECK(b.pdg.vertex(fref).subkind == PdgSubkind::FunctionRef);
  CHECK(has_edge(b.pdg, root, fref, PdgEdgeLabel::Qual));
  int call = find_vertex(b.pdg, PdgKind::Operation, "()");
  REQUIRE(call >= 0);
  CHECK(has_edge(b.pdg, fref, call, PdgEdgeLabel::Recv));
}

TEST_CASE("literals with equal lexemes stay distinct per occurrence") {
  Built b = build("def f():\n    a = 7\n    b = 7\n");
  int count = 0;
  for (const PdgNode &v : b.pdg.vertices)
    if (v.subkind == PdgSubkind::LiteralValue && v.label == "7")
      ++count;
  CHECK(count == 2);
}

TEST_CASE("determinism: equal sources yield identical debug graphs") {
  std::string source = "def f(xs):\n"
                       "    total = 0\n"
                       "    for x in xs:\n"
                       "        if x > 0:\n"
                       "            total += x\n"
                       "    return total\n";
  Built a = build(source);
  Built b = build(source);
  CHECK(write_debug_graph(a.pdg) == write_debug_graph(b.pdg));
}

TEST_CASE("debug export golden") {
  Built b = build("def f():\n    x = 1\n");
  // canonical order: by first syntax-ref span start (assign owns the whole
  // statement, so it sorts first), then edges by ids
  CHECK(write_debug_graph(b.pdg) == "V 1 operation assign \"=\"\n"
                                    "V 2 data variable \"x\"\n"
                                    "V 0 data literal \"1\"\n"
                                    "E 0 1 data para\n"
                                    "E 1 2 data def\n");
}

TEST_CASE("highlight spans") {
  Built b = build("def walk():\n"
                  "    data = [1, 2]\n"
                  "    for i in range(len(data)):\n"
                  "        data[i]\n");
  int data = find_vertex(b.pdg, PdgKind::Data, "data");
  REQUIRE(data >= 0);

  SUBCASE("single data vertex covers its occurrences") {
    std::vector<Span> spans = highlight_spans(b.pdg, {data});
    CHECK(spans.size() == 3);
    CHECK(b.tree->lines.line_of(spans[0].begin) == 2);
    CHECK(b.tree->lines.line_of(spans[1].begin) == 3);
    CHECK(b.tree->lines.line_of(spans[2].begin) == 4);
  }
  SUBCASE("empty set gives empty list") {
    CHECK(highlight_spans(b.pdg, {}).empty());
  }
  SUBCASE("unknown vertex throws") {
    CHECK_THROWS_AS(highlight_spans(b.pdg, {999}), UnknownVertex);
  }
  SUBCASE("full-match vertex set spans multiple non-contiguous lines") {
    std::set<int> all;
    for (const PdgNode &v : b.pdg.vertices)
      all.insert(v.id);
    std::vector<Span> spans = highlight_spans(b.pdg, all);
    REQUIRE(!spans.empty());
    std::set<int> lines;
    for (const Span &span : spans)
      lines.insert(b.tree->lines.line_of(span.begin));
    CHECK(lines.count(2) == 1); // the data definition line
    CHECK(lines.size() >= 2);
  }
}

TEST_CASE("graph size stays linear in node count over the corpus") {
  for (const auto &file : corpus_files()) {
    std::string source = slurp(file);
    SyntaxTree tree;
    try {
      tree = parse_source(source);
    } catch (const ParseError &) {
      continue;
    }
    for (const FunctionUnit &unit : function_units(tree)) {
      Pdg pdg = build_fgpdg(tree, unit.node);
      INFO(file.string());
      CHECK(pdg.vertices.size() <= 2 * tree.subtree(unit.node).size());
    }
  }
}

TEST_CASE("unsupported constructs contribute nothing but do not fail") {
  Built b = build("def f():\n"
                  "    global state\n"
                  "    import os\n"
                  "    lambda q: q\n");
  CHECK(b.pdg.vertices.empty());
}
