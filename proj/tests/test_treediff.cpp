#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdgfix/treediff.hpp"
#include "support.hpp"

using namespace pdgfix;
using testsupport::corpus_files;
using testsupport::mutate_tree;
using testsupport::slurp;

namespace {

std::vector<EditAction> diff(const SyntaxTree &before,
                             const SyntaxTree &after) {
  return compute_edit_script(before, after, match_trees(before, after));
}

} // namespace

TEST_CASE("identical trees map completely and diff to an empty script") {
  std::string source = "def f(a):\n    return a + 1\n";
  SyntaxTree before = parse_source(source);
  SyntaxTree after = parse_source(source);
  NodeMapping mapping = match_trees(before, after);
  CHECK(mapping.size() == before.subtree(before.root).size());
  CHECK(diff(before, after).empty());
}

TEST_CASE("single identifier rename maps every node and yields one update") {
  SyntaxTree before = parse_source("x = foo\n");
  SyntaxTree after = parse_source("x = bar\n");
  NodeMapping mapping = match_trees(before, after);
  // every node mapped; the renamed identifier pairs up in the bottom-up phase
  CHECK(mapping.size() == before.subtree(before.root).size());
  std::vector<EditAction> script = diff(before, after);
  REQUIRE(script.size() == 1);
  CHECK(script[0].op == EditOp::Update);
  CHECK(script[0].label == "bar");
}

TEST_CASE("range to enumerate pair applies to the after shape") {
  std::string before_src = slurp(std::filesystem::path(PDGFIX_CORPUS_DIR) /
                                 ".." / ".." / "patterns" / "use-enumerate" /
                                 "1" / "before.py");
  std::string after_src = slurp(std::filesystem::path(PDGFIX_CORPUS_DIR) /
                                ".." / ".." / "patterns" / "use-enumerate" /
                                "1" / "after.py");
  REQUIRE(!before_src.empty());
  REQUIRE(!after_src.empty());
  SyntaxTree before = parse_source(before_src);
  SyntaxTree after = parse_source(after_src);
  std::vector<EditAction> script = diff(before, after);
  CHECK(!script.empty());
  ApplyResult applied = apply_edit_script(before, script);
  CHECK(structural_equal(applied.tree, after));
}

TEST_CASE("empty script leaves the tree unchanged") {
  SyntaxTree tree = parse_source("def f():\n    return 1\n");
  ApplyResult applied = apply_edit_script(tree, {});
  CHECK(structural_equal(tree, applied.tree));
}

TEST_CASE("dangling reference aborts transactionally") {
  std::string source = "def f():\n    a = 1\n    b = 2\n";
  SyntaxTree tree = parse_source(source);
  NodeId stmt = kNoNode;
  for (const SyntaxNode &n : tree.nodes)
    if (n.kind == NodeKind::Assign)
      stmt = n.id;
  REQUIRE(stmt != kNoNode);
  std::vector<EditAction> script;
  EditAction del;
  del.op = EditOp::Delete;
  del.target = NodeRef::existing(stmt);
  script.push_back(del);
  script.push_back(del); // same node again: dangling
  try {
    apply_edit_script(tree, script);
    FAIL("expected DanglingReference");
  } catch (const DanglingReference &e) {
    CHECK(e.action_index == 1);
  }
  // the input tree is untouched
  CHECK(render(tree, source, {}) == source);
  CHECK(structural_equal(tree, parse_source(source)));
}

TEST_CASE("update/insert/move positions respect script order") {
  SyntaxTree before = parse_source("def f():\n    a = 1\n");
  SyntaxTree after = parse_source("def f():\n    b = 2\n    a = 1\n");
  std::vector<EditAction> script = diff(before, after);
  ApplyResult applied = apply_edit_script(before, script);
  CHECK(structural_equal(applied.tree, after));
}

// The module's master property: 200 randomized mutated pairs round-trip
// through match + script + apply into structural equality, every time.
TEST_CASE("apply-equivalence over 200 randomized mutated pairs") {
  std::vector<std::filesystem::path> files = corpus_files("positives");
  REQUIRE(!files.empty());
  std::mt19937 rng(20240817);
  int checked = 0;
  int failures = 0;
  while (checked < 200) {
    const auto &file = files[checked % files.size()];
    SyntaxTree before = parse_source(slurp(file));
    int mutations = 1 + static_cast<int>(rng() % 5);
    SyntaxTree after = mutate_tree(before, rng, mutations);
    NodeMapping mapping = match_trees(before, after);
    std::vector<EditAction> script =
        compute_edit_script(before, after, mapping);
    ApplyResult applied = apply_edit_script(before, script);
    if (!structural_equal(applied.tree, after)) {
      ++failures;
      INFO(file.string() << " seed-index " << checked);
      CHECK(structural_equal(applied.tree, after));
    }
    ++checked;
  }
  CHECK(failures == 0);
  CHECK(checked == 200);
}
