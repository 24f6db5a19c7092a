#include "pdgfix/matcher.hpp"

#include <algorithm>

#include "pdgfix/errors.hpp"

namespace pdgfix {

const char *matching_mode_name(MatchingMode::Variant variant) {
  switch (variant) {
  case MatchingMode::MatchOriginalLabels:
    return "match_original_labels";
  case MatchingMode::MatchAnyLabel:
    return "match_any_label";
  case MatchingMode::MatchLongestCommonSuffix:
    return "match_longest_common_suffix";
  }
  return "?";
}

bool label_compatible(const MatchingMode &mode,
                      const std::string &pattern_label,
                      const std::string &target_label) {
  switch (mode.variant) {
  case MatchingMode::MatchAnyLabel:
    return true;
  case MatchingMode::MatchLongestCommonSuffix:
    return target_label.size() >= mode.suffix.size() &&
           target_label.compare(target_label.size() - mode.suffix.size(),
                                mode.suffix.size(), mode.suffix) == 0;
  case MatchingMode::MatchOriginalLabels:
    return pattern_label == target_label;
  }
  return false;
}

namespace {

struct EdgeKey {
  PdgEdgeKind kind;
  PdgEdgeLabel label;
  int position;
  friend bool operator==(const EdgeKey &a, const EdgeKey &b) {
    return a.kind == b.kind && a.label == b.label && a.position == b.position;
  }
};

class Search {
public:
  Search(const PatternBundle &bundle, const Pdg &target, long budget)
      : bundle_(bundle), pattern_(bundle.graph), target_(target),
        budget_(budget) {}

  MatchResult run() {
    MatchResult result;
    collect_pattern_vertices();
    if (order_.empty())
      return result;
    index_target();
    // Per-vertex candidate lists; a vertex with no candidate ends the
    // search before any backtracking.
    candidates_.assign(pattern_.vertices.size(), {});
    for (int p : order_) {
      const PdgNode &pv = pattern_.vertex(p);
      for (const PdgNode &tv : target_.vertices)
        if (target_degree_[tv.id] >=
                static_cast<int>(incident_[p].size()) &&
            vertex_compatible(pv, tv))
          candidates_[p].push_back(tv.id);
      if (candidates_[p].empty())
        return result;
    }
    assignment_.assign(pattern_.vertices.size(), -1);
    used_.assign(target_.vertices.size(), false);
    try {
      backtrack(0);
    } catch (const BudgetExceeded &) {
      result.budget_exceeded = true;
      result.matches.clear();
      return result;
    }
    result.matches = finalize();
    return result;
  }

private:
  struct BudgetExceeded {};

  void collect_pattern_vertices() {
    std::vector<int> degree(pattern_.vertices.size(), 0);
    for (const PdgEdge &e : pattern_.edges) {
      if (e.label == PdgEdgeLabel::Anchor)
        continue;
      ++degree[e.src];
      ++degree[e.dst];
    }
    for (const PdgNode &v : pattern_.vertices)
      if (!v.anchor)
        order_.push_back(v.id);
    auto permissiveness = [this](int id) {
      const PdgNode &v = pattern_.vertex(id);
      if (v.kind != PdgKind::Data)
        return 0; // exact label, least permissive
      auto it = bundle_.modes.find(id);
      if (it == bundle_.modes.end())
        return 0;
      switch (it->second.variant) {
      case MatchingMode::MatchOriginalLabels:
        return 0;
      case MatchingMode::MatchLongestCommonSuffix:
        return 1;
      case MatchingMode::MatchAnyLabel:
        return 2;
      }
      return 2;
    };
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (degree[a] != degree[b])
        return degree[a] > degree[b];
      int pa = permissiveness(a), pb = permissiveness(b);
      if (pa != pb)
        return pa < pb;
      return a < b;
    });
    // Pattern edges between non-anchor vertices, bucketed per vertex.
    incident_.assign(pattern_.vertices.size(), {});
    for (size_t i = 0; i < pattern_.edges.size(); ++i) {
      const PdgEdge &e = pattern_.edges[i];
      if (e.label == PdgEdgeLabel::Anchor || pattern_.vertex(e.src).anchor ||
          pattern_.vertex(e.dst).anchor)
        continue;
      incident_[e.src].push_back(static_cast<int>(i));
      incident_[e.dst].push_back(static_cast<int>(i));
    }
  }

  void index_target() {
    target_degree_.assign(target_.vertices.size(), 0);
    for (size_t i = 0; i < target_.edges.size(); ++i) {
      const PdgEdge &e = target_.edges[i];
      ++target_degree_[e.src];
      ++target_degree_[e.dst];
      edges_from_[{e.src, e.dst}].push_back(static_cast<int>(i));
    }
  }

  bool vertex_compatible(const PdgNode &p, const PdgNode &t) const {
    if (p.kind != t.kind || p.subkind != t.subkind)
      return false;
    if (p.kind == PdgKind::Data) {
      auto it = bundle_.modes.find(p.id);
      MatchingMode mode; // defaults to exact
      if (it != bundle_.modes.end())
        mode = it->second;
      return label_compatible(mode, p.label, t.label);
    }
    return p.label == t.label;
  }

  // Finds a target edge (m(src), m(dst)) with the same kind/label/position.
  int find_target_edge(const PdgEdge &pe, int tsrc, int tdst) const {
    auto it = edges_from_.find({tsrc, tdst});
    if (it == edges_from_.end())
      return -1;
    for (int idx : it->second) {
      const PdgEdge &te = target_.edges[idx];
      if (te.kind == pe.kind && te.label == pe.label &&
          te.position == pe.position)
        return idx;
    }
    return -1;
  }

  void backtrack(size_t depth) {
    if (depth == order_.size()) {
      record();
      return;
    }
    int p = order_[depth];
    for (int t : candidates_[p]) {
      if (--budget_ < 0)
        throw BudgetExceeded{};
      if (used_[t])
        continue;
      // Every pattern edge to an already-assigned vertex must exist.
      std::vector<std::pair<int, int>> matched_edges;
      bool ok = true;
      for (int ei : incident_[p]) {
        const PdgEdge &pe = pattern_.edges[ei];
        int other = pe.src == p ? pe.dst : pe.src;
        if (assignment_[other] < 0)
          continue;
        int tsrc = pe.src == p ? t : assignment_[pe.src];
        int tdst = pe.dst == p ? t : assignment_[pe.dst];
        int te = find_target_edge(pe, tsrc, tdst);
        if (te < 0) {
          ok = false;
          break;
        }
        matched_edges.push_back({ei, te});
      }
      if (!ok)
        continue;
      assignment_[p] = t;
      used_[t] = true;
      for (auto &[ei, te] : matched_edges)
        edge_assignment_[ei] = te;
      backtrack(depth + 1);
      for (auto &[ei, te] : matched_edges)
        edge_assignment_.erase(ei);
      assignment_[p] = -1;
      used_[t] = false;
    }
  }

  void record() {
    Isomorphism iso;
    for (int p : order_)
      iso.vertex_map[p] = assignment_[p];
    iso.edge_map = edge_assignment_;
    for (const auto &[placeholder, vid] : bundle_.bound_names) {
      auto it = iso.vertex_map.find(vid);
      if (it != iso.vertex_map.end())
        iso.binding[placeholder] = target_.vertex(it->second).label;
    }
    raw_.push_back(std::move(iso));
  }

  std::vector<Isomorphism> finalize() {
    // Dedup on identical target-vertex sets; keep the lexicographically
    // smallest mapping.
    auto mapping_sequence = [](const Isomorphism &iso) {
      std::vector<int> seq;
      for (const auto &[p, t] : iso.vertex_map)
        seq.push_back(t);
      return seq;
    };
    std::map<std::vector<int>, Isomorphism> best;
    for (Isomorphism &iso : raw_) {
      std::vector<int> key = mapping_sequence(iso);
      std::vector<int> sorted_key = key;
      std::sort(sorted_key.begin(), sorted_key.end());
      auto it = best.find(sorted_key);
      if (it == best.end() || key < mapping_sequence(it->second))
        best[sorted_key] = iso;
    }
    std::vector<Isomorphism> out;
    for (auto &[key, iso] : best)
      out.push_back(iso);
    std::sort(out.begin(), out.end(),
              [this](const Isomorphism &a, const Isomorphism &b) {
                uint32_t sa = min_span_start(a), sb = min_span_start(b);
                if (sa != sb)
                  return sa < sb;
                return mapping_less(a, b);
              });
    return out;
  }

  uint32_t min_span_start(const Isomorphism &iso) const {
    uint32_t best = UINT32_MAX;
    for (const auto &[p, t] : iso.vertex_map) {
      const PdgNode &tv = target_.vertex(t);
      for (NodeId ref : tv.syntax_refs)
        best = std::min(best, target_.tree->at(ref).span.begin);
    }
    return best;
  }

  static bool mapping_less(const Isomorphism &a, const Isomorphism &b) {
    return std::vector<std::pair<int, int>>(a.vertex_map.begin(),
                                            a.vertex_map.end()) <
           std::vector<std::pair<int, int>>(b.vertex_map.begin(),
                                            b.vertex_map.end());
  }

  const PatternBundle &bundle_;
  const Pdg &pattern_;
  const Pdg &target_;
  long budget_;
  std::vector<int> order_;
  std::vector<std::vector<int>> candidates_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> target_degree_;
  std::map<std::pair<int, int>, std::vector<int>> edges_from_;
  std::vector<int> assignment_;
  std::vector<bool> used_;
  std::map<int, int> edge_assignment_;
  std::vector<Isomorphism> raw_;
};

} // namespace

MatchResult find_matches(const PatternBundle &bundle, const Pdg &target,
                         long budget) {
  return Search(bundle, target, budget).run();
}

} // namespace pdgfix
