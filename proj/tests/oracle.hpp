#pragma once

// Brute-force subgraph-match oracle, independent of the matcher's search:
// enumerates every injective kind/subkind/mode-compatible assignment, filters
// on full edge preservation, applies the same dedup rule.

#include <functional>
#include <map>
#include <vector>

#include "pdgfix/matcher.hpp"

namespace testsupport {

inline std::vector<std::map<int, int>>
brute_force_matches(const pdgfix::PatternBundle &bundle,
                    const pdgfix::Pdg &target) {
  using namespace pdgfix;
  std::vector<int> pattern_vertices;
  for (const PdgNode &v : bundle.graph.vertices)
    if (!v.anchor)
      pattern_vertices.push_back(v.id);
  std::vector<std::map<int, int>> raw;
  std::map<int, int> assignment;
  std::vector<bool> used(target.vertices.size(), false);

  std::function<void(size_t)> rec = [&](size_t depth) {
    if (depth == pattern_vertices.size()) {
      raw.push_back(assignment);
      return;
    }
    int p = pattern_vertices[depth];
    const PdgNode &pv = bundle.graph.vertex(p);
    for (const PdgNode &tv : target.vertices) {
      if (used[tv.id] || tv.kind != pv.kind || tv.subkind != pv.subkind)
        continue;
      if (pv.kind == PdgKind::Data) {
        MatchingMode mode;
        auto it = bundle.modes.find(p);
        if (it != bundle.modes.end())
          mode = it->second;
        if (!label_compatible(mode, pv.label, tv.label))
          continue;
      } else if (pv.label != tv.label) {
        continue;
      }
      assignment[p] = tv.id;
      used[tv.id] = true;
      rec(depth + 1);
      assignment.erase(p);
      used[tv.id] = false;
    }
  };
  rec(0);

  std::vector<std::map<int, int>> filtered;
  for (const auto &m : raw) {
    bool ok = true;
    for (const PdgEdge &pe : bundle.graph.edges) {
      if (pe.label == PdgEdgeLabel::Anchor ||
          bundle.graph.vertex(pe.src).anchor ||
          bundle.graph.vertex(pe.dst).anchor)
        continue;
      bool found = false;
      for (const PdgEdge &te : target.edges)
        if (te.src == m.at(pe.src) && te.dst == m.at(pe.dst) &&
            te.kind == pe.kind && te.label == pe.label &&
            te.position == pe.position)
          found = true;
      if (!found) {
        ok = false;
        break;
      }
    }
    if (ok)
      filtered.push_back(m);
  }

  std::map<std::vector<int>, std::map<int, int>> best;
  for (const auto &m : filtered) {
    std::vector<int> key;
    for (const auto &[p, t] : m)
      key.push_back(t);
    std::sort(key.begin(), key.end());
    auto as_seq = [](const std::map<int, int> &mp) {
      return std::vector<std::pair<int, int>>(mp.begin(), mp.end());
    };
    auto it = best.find(key);
    if (it == best.end() || as_seq(m) < as_seq(it->second))
      best[key] = m;
  }
  std::vector<std::map<int, int>> out;
  for (auto &[key, m] : best)
    out.push_back(m);
  return out;
}

} // namespace testsupport
