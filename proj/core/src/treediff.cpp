#include "pdgfix/treediff.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "pdgfix/errors.hpp"

namespace pdgfix {

const char *edit_op_name(EditOp op) {
  switch (op) {
  case EditOp::Insert:
    return "insert";
  case EditOp::Delete:
    return "delete";
  case EditOp::Update:
    return "update";
  case EditOp::Move:
    return "move";
  }
  return "?";
}

namespace {

// Structural fingerprint (kind, label, child shapes); equal subtrees get
// equal hashes, then candidates are verified exactly.
struct TreeInfo {
  std::vector<uint64_t> hash;
  std::vector<int> height;
  std::vector<int> descendants;

  explicit TreeInfo(const SyntaxTree &t) {
    hash.resize(t.nodes.size());
    height.resize(t.nodes.size());
    descendants.resize(t.nodes.size());
    if (t.root != kNoNode)
      compute(t, t.root);
  }

  void compute(const SyntaxTree &t, NodeId id) {
    const SyntaxNode &n = t.at(id);
    uint64_t h = std::hash<int>{}(static_cast<int>(n.kind));
    h = h * 1099511628211ULL ^ std::hash<std::string>{}(n.label);
    int hi = 0, desc = 0;
    for (NodeId child : n.children) {
      compute(t, child);
      h = h * 1099511628211ULL ^ hash[child];
      hi = std::max(hi, height[child]);
      desc += descendants[child] + 1;
    }
    hash[id] = h;
    height[id] = hi + 1;
    descendants[id] = desc;
  }
};

bool isomorphic(const SyntaxTree &a, NodeId ida, const SyntaxTree &b,
                NodeId idb) {
  return structural_equal(a, ida, b, idb);
}

class Matcher {
public:
  Matcher(const SyntaxTree &before, const SyntaxTree &after)
      : t1_(before), t2_(after), info1_(before), info2_(after) {}

  NodeMapping run() {
    if (t1_.root == kNoNode || t2_.root == kNoNode)
      return mapping_;
    top_down();
    bottom_up();
    if (!mapping_.has_src(t1_.root)) {
      mapping_.link(t1_.root, t2_.root);
      recover(t1_.root, t2_.root);
    }
    unique_pass();
    return mapping_;
  }

private:
  static constexpr int kMinHeight = 2;
  static constexpr double kMinDice = 0.5;

  void link_subtrees(NodeId a, NodeId b) {
    mapping_.link(a, b);
    const auto &ca = t1_.at(a).children;
    const auto &cb = t2_.at(b).children;
    for (size_t i = 0; i < ca.size(); ++i)
      link_subtrees(ca[i], cb[i]);
  }

  // Greedy pairing of isomorphic subtrees, tallest first; ties prefer an
  // identical parent-kind context, then source order.
  void top_down() {
    std::vector<NodeId> all1 = t1_.subtree(t1_.root);
    std::vector<NodeId> all2 = t2_.subtree(t2_.root);
    auto by_height_desc = [](const TreeInfo &info) {
      return [&info](NodeId x, NodeId y) {
        return info.height[x] != info.height[y]
                   ? info.height[x] > info.height[y]
                   : x < y;
      };
    };
    std::sort(all1.begin(), all1.end(), by_height_desc(info1_));
    std::multimap<uint64_t, NodeId> pool2;
    for (NodeId id : all2)
      if (info2_.height[id] >= kMinHeight)
        pool2.insert({info2_.hash[id], id});

    for (NodeId id1 : all1) {
      if (info1_.height[id1] < kMinHeight)
        break;
      if (mapping_.has_src(id1))
        continue;
      if (covered_by_mapping(t1_, id1))
        continue;
      auto [lo, hi] = pool2.equal_range(info1_.hash[id1]);
      NodeId best = kNoNode;
      bool best_parent_match = false;
      for (auto it = lo; it != hi; ++it) {
        NodeId id2 = it->second;
        if (mapping_.has_dst(id2) || covered_by_mapping(t2_, id2))
          continue;
        if (!isomorphic(t1_, id1, t2_, id2))
          continue;
        bool parent_match = parent_kind(t1_, id1) == parent_kind(t2_, id2);
        if (best == kNoNode || (parent_match && !best_parent_match) ||
            (parent_match == best_parent_match && id2 < best)) {
          best = id2;
          best_parent_match = parent_match;
        }
      }
      if (best != kNoNode)
        link_subtrees(id1, best);
    }
  }

  static int parent_kind(const SyntaxTree &t, NodeId id) {
    NodeId p = t.at(id).parent;
    return p == kNoNode ? -1 : static_cast<int>(t.at(p).kind);
  }

  bool covered_by_mapping(const SyntaxTree &t, NodeId id) const {
    for (NodeId cur = t.at(id).parent; cur != kNoNode; cur = t.at(cur).parent)
      if ((&t == &t1_ && mapping_.has_src(cur)) ||
          (&t == &t2_ && mapping_.has_dst(cur)))
        return true;
    return false;
  }

  int common_descendants(NodeId id1, NodeId id2) const {
    int count = 0;
    for (NodeId d : t1_.subtree(id1)) {
      if (d == id1)
        continue;
      NodeId m = mapping_.dst_of(d);
      if (m != kNoNode && t2_.is_ancestor(id2, m) && m != id2)
        ++count;
    }
    return count;
  }

  double dice(NodeId id1, NodeId id2) const {
    int total = info1_.descendants[id1] + info2_.descendants[id2];
    if (total == 0)
      return 0.0;
    return 2.0 * common_descendants(id1, id2) / total;
  }

  void bottom_up() {
    std::vector<NodeId> postorder;
    std::function<void(NodeId)> walk = [&](NodeId id) {
      for (NodeId child : t1_.at(id).children)
        walk(child);
      postorder.push_back(id);
    };
    walk(t1_.root);

    std::vector<NodeId> all2 = t2_.subtree(t2_.root);
    for (NodeId id1 : postorder) {
      if (id1 == t1_.root || mapping_.has_src(id1))
        continue;
      const SyntaxNode &n1 = t1_.at(id1);
      if (n1.children.empty())
        continue;
      bool has_matched_child = false;
      for (NodeId d : t1_.subtree(id1))
        if (d != id1 && mapping_.has_src(d)) {
          has_matched_child = true;
          break;
        }
      if (!has_matched_child)
        continue;
      NodeId best = kNoNode;
      double best_dice = 0.0;
      for (NodeId id2 : all2) {
        if (mapping_.has_dst(id2) || t2_.at(id2).kind != n1.kind)
          continue;
        double d = dice(id1, id2);
        if (d > best_dice || (d == best_dice && best != kNoNode && id2 < best)) {
          best_dice = d;
          best = id2;
        }
      }
      if (best != kNoNode && best_dice >= kMinDice) {
        mapping_.link(id1, best);
        recover(id1, best);
      }
    }
  }

  // Alignment of yet unmapped children inside a paired container: exact
  // (kind, label) LCS first, then positional same-kind pairing; recurses into
  // every new pair.
  void recover(NodeId id1, NodeId id2) {
    const auto &c1 = t1_.at(id1).children;
    const auto &c2 = t2_.at(id2).children;
    std::vector<NodeId> u1, u2;
    for (NodeId c : c1)
      if (!mapping_.has_src(c))
        u1.push_back(c);
    for (NodeId c : c2)
      if (!mapping_.has_dst(c))
        u2.push_back(c);

    auto eq_exact = [&](NodeId a, NodeId b) {
      return t1_.at(a).kind == t2_.at(b).kind &&
             t1_.at(a).label == t2_.at(b).label;
    };
    auto eq_kind = [&](NodeId a, NodeId b) {
      return t1_.at(a).kind == t2_.at(b).kind;
    };

    std::vector<std::pair<NodeId, NodeId>> paired;
    for (auto &pr : lcs_pairs(u1, u2, eq_exact))
      paired.push_back(pr);
    std::vector<NodeId> r1, r2;
    for (NodeId c : u1)
      if (std::none_of(paired.begin(), paired.end(),
                       [&](auto &p) { return p.first == c; }))
        r1.push_back(c);
    for (NodeId c : u2)
      if (std::none_of(paired.begin(), paired.end(),
                       [&](auto &p) { return p.second == c; }))
        r2.push_back(c);
    for (auto &pr : lcs_pairs(r1, r2, eq_kind))
      paired.push_back(pr);

    for (auto &[a, b] : paired) {
      if (mapping_.has_src(a) || mapping_.has_dst(b))
        continue;
      mapping_.link(a, b);
      recover(a, b);
    }
  }

  template <typename Eq>
  std::vector<std::pair<NodeId, NodeId>>
  lcs_pairs(const std::vector<NodeId> &s1, const std::vector<NodeId> &s2,
            Eq eq) {
    size_t n = s1.size(), m = s2.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;)
      for (size_t j = m; j-- > 0;)
        dp[i][j] = eq(s1[i], s2[j]) ? dp[i + 1][j + 1] + 1
                                    : std::max(dp[i + 1][j], dp[i][j + 1]);
    std::vector<std::pair<NodeId, NodeId>> out;
    size_t i = 0, j = 0;
    while (i < n && j < m) {
      if (eq(s1[i], s2[j]) && dp[i][j] == dp[i + 1][j + 1] + 1) {
        out.push_back({s1[i], s2[j]});
        ++i;
        ++j;
      } else if (dp[i + 1][j] >= dp[i][j + 1]) {
        ++i;
      } else {
        ++j;
      }
    }
    return out;
  }

  // Unmapped subtrees that are structurally unique on both sides and sit
  // under corresponding mapped ancestors are paired (captures moves).
  void unique_pass() {
    std::map<uint64_t, std::vector<NodeId>> g1, g2;
    for (NodeId id : t1_.subtree(t1_.root))
      if (!mapping_.has_src(id))
        g1[info1_.hash[id]].push_back(id);
    for (NodeId id : t2_.subtree(t2_.root))
      if (!mapping_.has_dst(id))
        g2[info2_.hash[id]].push_back(id);
    for (auto &[h, list1] : g1) {
      auto it = g2.find(h);
      if (it == g2.end())
        continue;
      auto &list2 = it->second;
      if (list1.size() != 1 || list2.size() != 1)
        continue;
      NodeId a = list1[0], b = list2[0];
      if (mapping_.has_src(a) || mapping_.has_dst(b))
        continue;
      if (!isomorphic(t1_, a, t2_, b))
        continue;
      NodeId pa = nearest_mapped_ancestor(t1_, a);
      NodeId pb = nearest_mapped_ancestor(t2_, b);
      if (pa == kNoNode || mapping_.dst_of(pa) != pb)
        continue;
      link_subtrees(a, b);
    }
  }

  NodeId nearest_mapped_ancestor(const SyntaxTree &t, NodeId id) const {
    for (NodeId cur = t.at(id).parent; cur != kNoNode; cur = t.at(cur).parent) {
      if (&t == &t1_ && mapping_.has_src(cur))
        return cur;
      if (&t == &t2_ && mapping_.has_dst(cur))
        return cur;
    }
    return kNoNode;
  }

  const SyntaxTree &t1_;
  const SyntaxTree &t2_;
  TreeInfo info1_, info2_;
  NodeMapping mapping_;
};

// ---------------------------------------------------------------------------

class ScriptBuilder {
public:
  ScriptBuilder(const SyntaxTree &before, const SyntaxTree &after,
                const NodeMapping &mapping)
      : work_(before), after_(after) {
    for (auto &[src, dst] : mapping.pairs()) {
      src_of_[dst] = src;
      dst_of_[src] = dst;
    }
  }

  std::vector<EditAction> run() {
    if (work_.root == kNoNode || after_.root == kNoNode)
      return script_;
    std::deque<std::pair<NodeId, NodeId>> queue;
    queue.push_back({work_.root, after_.root});
    while (!queue.empty()) {
      auto [w, a] = queue.front();
      queue.pop_front();
      if (work_.at(w).label != after_.at(a).label) {
        EditAction act;
        act.op = EditOp::Update;
        act.target = ref_of(w);
        act.label = after_.at(a).label;
        script_.push_back(act);
        work_.at(w).label = after_.at(a).label;
      }
      align_children(w, a);
      for (NodeId ac : after_.at(a).children) {
        auto it = src_of_.find(ac);
        if (it != src_of_.end())
          queue.push_back({it->second, ac});
      }
    }
    delete_pass(work_.root);
    return script_;
  }

private:
  NodeRef ref_of(NodeId w) {
    auto it = inserted_action_.find(w);
    if (it != inserted_action_.end())
      return NodeRef::inserted(it->second);
    return NodeRef::existing(w);
  }

  int index_in_parent(NodeId w) const { return work_.child_index(w); }

  void align_children(NodeId w, NodeId a) {
    auto counterpart_w = [&](NodeId ac) -> NodeId {
      auto it = src_of_.find(ac);
      return it == src_of_.end() ? kNoNode : it->second;
    };

    // Children already matched to each other keep their relative order when
    // it agrees on both sides (classic LCS alignment).
    std::vector<NodeId> s1, s2;
    for (NodeId c : work_.at(w).children) {
      auto it = dst_of_.find(c);
      if (it != dst_of_.end() && after_.at(it->second).parent == a)
        s1.push_back(c);
    }
    for (NodeId ac : after_.at(a).children) {
      NodeId c = counterpart_w(ac);
      if (c != kNoNode && work_.at(c).parent == w)
        s2.push_back(ac);
    }
    std::set<NodeId> in_order;
    {
      size_t n = s1.size(), m = s2.size();
      std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
      auto eq = [&](size_t i, size_t j) {
        return dst_of_.at(s1[i]) == s2[j];
      };
      for (size_t i = n; i-- > 0;)
        for (size_t j = m; j-- > 0;)
          dp[i][j] = eq(i, j) ? dp[i + 1][j + 1] + 1
                              : std::max(dp[i + 1][j], dp[i][j + 1]);
      size_t i = 0, j = 0;
      while (i < n && j < m) {
        if (eq(i, j) && dp[i][j] == dp[i + 1][j + 1] + 1) {
          in_order.insert(s1[i]);
          ++i;
          ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
          ++i;
        } else {
          ++j;
        }
      }
    }

    const auto &a_children = after_.at(a).children;
    for (NodeId ac : a_children) {
      NodeId c = counterpart_w(ac);
      if (c == kNoNode) {
        int k = find_pos(w, a, ac);
        EditAction act;
        act.op = EditOp::Insert;
        act.new_kind = after_.at(ac).kind;
        act.label = after_.at(ac).label;
        act.parent = ref_of(w);
        act.position = k;
        int action_index = static_cast<int>(script_.size());
        script_.push_back(act);
        NodeId fresh = work_.make_node(act.new_kind, act.label);
        work_.insert_child(w, fresh, static_cast<size_t>(k));
        inserted_action_[fresh] = action_index;
        src_of_[ac] = fresh;
        dst_of_[fresh] = ac;
        in_order_placed_.insert(fresh);
      } else if (work_.at(c).parent != w) {
        int k = find_pos(w, a, ac);
        emit_move(c, w, k);
      } else if (!in_order.count(c)) {
        // Re-anchor misplaced children; position recomputed after detach.
        int k = find_pos(w, a, ac);
        emit_move(c, w, k, /*same_parent=*/true);
      } else {
        in_order_placed_.insert(c);
      }
    }
  }

  void emit_move(NodeId c, NodeId w, int k, bool same_parent = false) {
    if (same_parent) {
      int cur = index_in_parent(c);
      work_.detach(c);
      int adjusted = k;
      if (cur >= 0 && cur < k)
        adjusted = k - 1 >= 0 ? k - 1 : 0;
      work_.insert_child(w, c, static_cast<size_t>(adjusted));
      EditAction act;
      act.op = EditOp::Move;
      act.target = ref_of(c);
      act.parent = ref_of(w);
      act.position = adjusted;
      script_.push_back(act);
    } else {
      work_.detach(c);
      work_.insert_child(w, c, static_cast<size_t>(k));
      EditAction act;
      act.op = EditOp::Move;
      act.target = ref_of(c);
      act.parent = ref_of(w);
      act.position = k;
      script_.push_back(act);
    }
    in_order_placed_.insert(c);
  }

  // Position of `ac` in the working child list of `w`: right after the
  // nearest already-placed left sibling's counterpart.
  int find_pos(NodeId w, NodeId a, NodeId ac) {
    const auto &a_children = after_.at(a).children;
    NodeId left_placed = kNoNode;
    for (NodeId sib : a_children) {
      if (sib == ac)
        break;
      NodeId c = src_of_.count(sib) ? src_of_.at(sib) : kNoNode;
      if (c != kNoNode && work_.at(c).parent == w && in_order_placed_.count(c))
        left_placed = c;
    }
    if (left_placed == kNoNode)
      return 0;
    return index_in_parent(left_placed) + 1;
  }

  void delete_pass(NodeId id) {
    // Children first (bottom-up deletes).
    std::vector<NodeId> kids = work_.at(id).children;
    for (NodeId child : kids)
      delete_pass(child);
    if (!dst_of_.count(id) && id != work_.root) {
      EditAction act;
      act.op = EditOp::Delete;
      act.target = ref_of(id);
      script_.push_back(act);
      work_.detach(id);
    }
  }

  SyntaxTree work_;
  const SyntaxTree &after_;
  std::unordered_map<NodeId, NodeId> src_of_; // after -> work
  std::unordered_map<NodeId, NodeId> dst_of_; // work -> after
  std::unordered_map<NodeId, int> inserted_action_;
  std::set<NodeId> in_order_placed_;
  std::vector<EditAction> script_;
};

} // namespace

NodeMapping match_trees(const SyntaxTree &before, const SyntaxTree &after) {
  return Matcher(before, after).run();
}

std::vector<EditAction> compute_edit_script(const SyntaxTree &before,
                                            const SyntaxTree &after,
                                            const NodeMapping &mapping) {
  return ScriptBuilder(before, after, mapping).run();
}

ApplyResult apply_edit_script(const SyntaxTree &tree,
                              const std::vector<EditAction> &script) {
  ApplyResult result{tree, {}, {}};
  SyntaxTree &work = result.tree;
  result.inserted.assign(script.size(), kNoNode);

  auto resolve = [&](const NodeRef &ref, int index) -> NodeId {
    NodeId id = kNoNode;
    if (ref.ref == NodeRef::Inserted) {
      if (ref.action < 0 || ref.action >= index ||
          result.inserted[ref.action] == kNoNode)
        throw DanglingReference(index, "reference to missing insert action");
      id = result.inserted[ref.action];
    } else {
      id = ref.node;
      if (!work.valid(id))
        throw DanglingReference(index, "node id out of range");
    }
    // The node must still be attached to the tree.
    if (id != work.root && !work.is_ancestor(work.root, id))
      throw DanglingReference(index, "node is no longer attached");
    return id;
  };

  for (size_t i = 0; i < script.size(); ++i) {
    const EditAction &act = script[i];
    int index = static_cast<int>(i);
    switch (act.op) {
    case EditOp::Insert: {
      NodeId parent = resolve(act.parent, index);
      if (act.position < 0 ||
          act.position > static_cast<int>(work.at(parent).children.size()))
        throw DanglingReference(index, "insert position out of range");
      NodeId fresh = work.make_node(act.new_kind, act.label);
      work.insert_child(parent, fresh, static_cast<size_t>(act.position));
      result.inserted[i] = fresh;
      result.touched.insert(parent);
      result.touched.insert(fresh);
      break;
    }
    case EditOp::Delete: {
      NodeId target = resolve(act.target, index);
      if (target == work.root)
        throw DanglingReference(index, "cannot delete the root");
      NodeId parent = work.at(target).parent;
      work.detach(target);
      if (parent != kNoNode)
        result.touched.insert(parent);
      break;
    }
    case EditOp::Update: {
      NodeId target = resolve(act.target, index);
      work.at(target).label = act.label;
      result.touched.insert(target);
      break;
    }
    case EditOp::Move: {
      NodeId target = resolve(act.target, index);
      NodeId parent = resolve(act.parent, index);
      if (work.is_ancestor(target, parent))
        throw DanglingReference(index, "move into own subtree");
      NodeId old_parent = work.at(target).parent;
      work.detach(target);
      if (act.position < 0 ||
          act.position > static_cast<int>(work.at(parent).children.size()))
        throw DanglingReference(index, "move position out of range");
      work.insert_child(parent, target, static_cast<size_t>(act.position));
      if (old_parent != kNoNode)
        result.touched.insert(old_parent);
      result.touched.insert(parent);
      break;
    }
    }
  }
  return result;
}

} // namespace pdgfix
