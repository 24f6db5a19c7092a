#pragma once

// Shared helpers for the test suites.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdgfix/syntax.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace pdgfix;

inline std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<fs::path> corpus_files(const std::string &subdir = "") {
  std::vector<fs::path> files;
  fs::path root = fs::path(PDGFIX_CORPUS_DIR) / subdir;
  for (const auto &entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file() && entry.path().extension() == ".py")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::vector<NodeId> attached_nodes(const SyntaxTree &tree) {
  return tree.subtree(tree.root);
}

/// Random tree mutations used by the diff apply-equivalence property:
/// rename, insert-stmt, delete-stmt, move-stmt.
inline SyntaxTree mutate_tree(const SyntaxTree &input, std::mt19937 &rng,
                              int mutations) {
  SyntaxTree tree = input;
  const char *names[] = {"alpha", "beta",  "gamma", "delta",
                         "omega", "sigma", "kappa", "theta"};
  for (int m = 0; m < mutations; ++m) {
    std::vector<NodeId> nodes = tree.subtree(tree.root);
    std::vector<NodeId> blocks, stmts, name_nodes;
    for (NodeId id : nodes) {
      const SyntaxNode &n = tree.at(id);
      if (is_block_kind(n.kind))
        blocks.push_back(id);
      if (n.parent != kNoNode && is_block_kind(tree.at(n.parent).kind) &&
          is_statement_kind(n.kind))
        stmts.push_back(id);
      if (n.kind == NodeKind::Name)
        name_nodes.push_back(id);
    }
    switch (rng() % 4) {
    case 0: { // rename
      if (name_nodes.empty())
        break;
      NodeId target = name_nodes[rng() % name_nodes.size()];
      tree.at(target).label = names[rng() % 8];
      break;
    }
    case 1: { // insert statement
      NodeId block = blocks[rng() % blocks.size()];
      size_t pos = rng() % (tree.at(block).children.size() + 1);
      if (rng() % 2 == 0) {
        NodeId stmt = tree.make_node(NodeKind::PassStmt, "");
        tree.insert_child(block, stmt, pos);
      } else {
        NodeId stmt = tree.make_node(NodeKind::Assign, "");
        NodeId lhs = tree.make_node(NodeKind::Name, names[rng() % 8]);
        NodeId rhs = tree.make_node(NodeKind::Literal, "1");
        tree.append_child(stmt, lhs);
        tree.append_child(stmt, rhs);
        tree.insert_child(block, stmt, pos);
      }
      break;
    }
    case 2: { // delete statement
      if (stmts.empty())
        break;
      tree.detach(stmts[rng() % stmts.size()]);
      break;
    }
    case 3: { // move statement
      if (stmts.empty())
        break;
      NodeId stmt = stmts[rng() % stmts.size()];
      std::vector<NodeId> candidates;
      for (NodeId block : blocks)
        if (!tree.is_ancestor(stmt, block))
          candidates.push_back(block);
      if (candidates.empty())
        break;
      NodeId block = candidates[rng() % candidates.size()];
      tree.detach(stmt);
      tree.insert_child(block, stmt,
                        rng() % (tree.at(block).children.size() + 1));
      break;
    }
    }
  }
  return tree;
}

} // namespace testsupport
