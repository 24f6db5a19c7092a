#include "pdgfix/patterncompile.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "pdgfix/errors.hpp"
#include "pdgfix/matcher.hpp"

namespace pdgfix {

PatternInstance make_instance(std::string before_source,
                              std::string after_source) {
  PatternInstance inst;
  inst.before_source = std::move(before_source);
  inst.after_source = std::move(after_source);
  inst.before_tree =
      std::make_shared<SyntaxTree>(parse_source(inst.before_source));
  inst.after_tree =
      std::make_shared<SyntaxTree>(parse_source(inst.after_source));
  std::vector<FunctionUnit> units = function_units(*inst.before_tree);
  NodeId unit = units.empty() ? inst.before_tree->root : units.front().node;
  inst.before_pdg = build_fgpdg(*inst.before_tree, unit);
  return inst;
}

namespace {

// ---- alignment ------------------------------------------------------------

struct AlignSearch {
  const Pdg &canonical;
  const Pdg &instance;
  std::vector<std::vector<int>> canon_incident;
  std::map<std::pair<int, int>, std::vector<int>> inst_edges;
  std::vector<int> assignment;
  std::vector<bool> used;
  std::vector<int> best;
  int best_score = -1;
  long budget = 2000000;

  explicit AlignSearch(const Pdg &canonical, const Pdg &instance)
      : canonical(canonical), instance(instance) {
    canon_incident.assign(canonical.vertices.size(), {});
    for (size_t i = 0; i < canonical.edges.size(); ++i) {
      canon_incident[canonical.edges[i].src].push_back(static_cast<int>(i));
      canon_incident[canonical.edges[i].dst].push_back(static_cast<int>(i));
    }
    for (size_t i = 0; i < instance.edges.size(); ++i) {
      const PdgEdge &e = instance.edges[i];
      inst_edges[{e.src, e.dst}].push_back(static_cast<int>(i));
    }
    assignment.assign(canonical.vertices.size(), -1);
    used.assign(instance.vertices.size(), false);
  }

  bool edge_exists(const PdgEdge &ce, int tsrc, int tdst) const {
    auto it = inst_edges.find({tsrc, tdst});
    if (it == inst_edges.end())
      return false;
    for (int idx : it->second) {
      const PdgEdge &te = instance.edges[idx];
      if (te.kind == ce.kind && te.label == ce.label &&
          te.position == ce.position)
        return true;
    }
    return false;
  }

  void run(size_t depth, int score) {
    if (budget-- < 0)
      return;
    size_t n = canonical.vertices.size();
    if (score + static_cast<int>(n - depth) <= best_score)
      return; // cannot beat the best even with full label agreement
    if (depth == n) {
      if (score > best_score) {
        best_score = score;
        best = assignment;
      }
      return;
    }
    const PdgNode &cv = canonical.vertices[depth];
    // Prefer label-equal candidates so good bounds are found early; the
    // final tie-break (lexicographically smallest id sequence) falls out of
    // the in-order scan because equal scores never replace the stored best.
    for (int pass = 0; pass < 2; ++pass) {
      for (const PdgNode &tv : instance.vertices) {
        bool label_eq = tv.label == cv.label;
        if ((pass == 0) != label_eq)
          continue;
        if (used[tv.id] || tv.kind != cv.kind || tv.subkind != cv.subkind)
          continue;
        bool ok = true;
        for (int ei : canon_incident[depth]) {
          const PdgEdge &ce = canonical.edges[ei];
          int other = ce.src == static_cast<int>(depth) ? ce.dst : ce.src;
          if (assignment[other] < 0 && other != static_cast<int>(depth))
            continue;
          int tsrc =
              ce.src == static_cast<int>(depth) ? tv.id : assignment[ce.src];
          int tdst =
              ce.dst == static_cast<int>(depth) ? tv.id : assignment[ce.dst];
          if (!edge_exists(ce, tsrc, tdst)) {
            ok = false;
            break;
          }
        }
        if (!ok)
          continue;
        assignment[depth] = tv.id;
        used[tv.id] = true;
        run(depth + 1, score + (label_eq ? 1 : 0));
        assignment[depth] = -1;
        used[tv.id] = false;
      }
    }
  }
};

std::map<int, int> align_one(const Pdg &canonical, const Pdg &instance,
                             int instance_index) {
  AlignSearch search(canonical, instance);
  search.run(0, 0);
  if (search.best_score < 0)
    throw AlignmentFailure(instance_index,
                           "instance " + std::to_string(instance_index) +
                               ": no kind- and edge-preserving mapping of the "
                               "canonical graph exists");
  std::map<int, int> mapping;
  for (size_t i = 0; i < search.best.size(); ++i)
    mapping[static_cast<int>(i)] = search.best[i];
  return mapping;
}

// The lexicographic tie-break requires revisiting equal-score mappings in id
// order; AlignSearch's two-pass candidate scan does not guarantee that, so
// rerun a plain in-order scan pinned to the best score.
struct TieBreakSearch {
  AlignSearch base;
  int want_score;
  std::vector<int> found;

  TieBreakSearch(const Pdg &canonical, const Pdg &instance, int want_score)
      : base(canonical, instance), want_score(want_score) {}

  bool run(size_t depth, int score) {
    size_t n = base.canonical.vertices.size();
    if (score + static_cast<int>(n - depth) < want_score)
      return false;
    if (depth == n) {
      if (score == want_score) {
        found = base.assignment;
        return true;
      }
      return false;
    }
    const PdgNode &cv = base.canonical.vertices[depth];
    for (const PdgNode &tv : base.instance.vertices) {
      if (base.used[tv.id] || tv.kind != cv.kind || tv.subkind != cv.subkind)
        continue;
      bool ok = true;
      for (int ei : base.canon_incident[depth]) {
        const PdgEdge &ce = base.canonical.edges[ei];
        int tsrc = ce.src == static_cast<int>(depth)
                       ? tv.id
                       : base.assignment[ce.src];
        int tdst = ce.dst == static_cast<int>(depth)
                       ? tv.id
                       : base.assignment[ce.dst];
        if ((ce.src != static_cast<int>(depth) &&
             base.assignment[ce.src] < 0) ||
            (ce.dst != static_cast<int>(depth) && base.assignment[ce.dst] < 0))
          continue;
        if (!base.edge_exists(ce, tsrc, tdst)) {
          ok = false;
          break;
        }
      }
      if (!ok)
        continue;
      base.assignment[depth] = tv.id;
      base.used[tv.id] = true;
      if (run(depth + 1, score + (tv.label == cv.label ? 1 : 0)))
        return true;
      base.assignment[depth] = -1;
      base.used[tv.id] = false;
    }
    return false;
  }
};

} // namespace

std::vector<std::map<int, int>>
align_instances(const std::vector<PatternInstance> &instances) {
  std::vector<std::map<int, int>> alignments;
  if (instances.empty())
    return alignments;
  const Pdg &canonical = instances[0].before_pdg;
  for (size_t k = 1; k < instances.size(); ++k) {
    const Pdg &inst = instances[k].before_pdg;
    std::map<int, int> first = align_one(canonical, inst, static_cast<int>(k));
    // Re-derive the lexicographically smallest mapping with maximal score.
    AlignSearch probe(canonical, inst);
    probe.run(0, 0);
    TieBreakSearch tie(canonical, inst, probe.best_score);
    if (tie.run(0, 0)) {
      std::map<int, int> mapping;
      for (size_t i = 0; i < tie.found.size(); ++i)
        mapping[static_cast<int>(i)] = tie.found[i];
      alignments.push_back(std::move(mapping));
    } else {
      alignments.push_back(std::move(first));
    }
  }
  return alignments;
}

// ---- matching modes ---------------------------------------------------------

namespace {

std::string common_label_suffix(const std::vector<std::string> &labels) {
  if (labels.empty())
    return "";
  std::string suffix = labels[0];
  for (const std::string &label : labels) {
    size_t i = 0;
    while (i < suffix.size() && i < label.size() &&
           suffix[suffix.size() - 1 - i] == label[label.size() - 1 - i])
      ++i;
    suffix = suffix.substr(suffix.size() - i);
  }
  // Trim to a "." token boundary.
  size_t dot = suffix.find('.');
  if (dot == std::string::npos)
    return "";
  return suffix.substr(dot);
}

} // namespace

std::map<int, MatchingMode>
assign_matching_modes(const Pdg &canonical,
                      const std::vector<PatternInstance> &instances,
                      const std::vector<std::map<int, int>> &alignments,
                      const BuiltinRegistry &registry) {
  std::map<int, MatchingMode> modes;
  for (const PdgNode &v : canonical.vertices) {
    if (v.kind != PdgKind::Data || v.anchor)
      continue;
    std::vector<std::string> labels{v.label};
    for (size_t k = 0; k < alignments.size(); ++k) {
      auto it = alignments[k].find(v.id);
      if (it != alignments[k].end())
        labels.push_back(
            instances[k + 1].before_pdg.vertex(it->second).label);
    }
    bool all_same = std::all_of(labels.begin(), labels.end(),
                                [&](const std::string &l) {
                                  return l == labels.front();
                                });
    MatchingMode mode;
    if (v.subkind == PdgSubkind::LiteralValue) {
      // Literal lexemes are not identifiers: equal lexemes stay exact,
      // anything else is free.
      mode.variant = all_same ? MatchingMode::MatchOriginalLabels
                              : MatchingMode::MatchAnyLabel;
    } else if (all_same) {
      bool dotted = v.label.find('.') != std::string::npos;
      mode.variant = (dotted || registry.contains(v.label))
                         ? MatchingMode::MatchOriginalLabels
                         : MatchingMode::MatchAnyLabel;
    } else {
      std::string suffix = common_label_suffix(labels);
      if (suffix.size() >= 2) {
        mode.variant = MatchingMode::MatchLongestCommonSuffix;
        mode.suffix = suffix;
      } else {
        mode.variant = MatchingMode::MatchAnyLabel;
      }
    }
    modes[v.id] = mode;
  }
  return modes;
}

// ---- generalized LCS --------------------------------------------------------

std::vector<EditAction>
generalized_lcs(const std::vector<std::vector<EditAction>> &scripts,
                const std::vector<std::vector<ActionSignature>> &signatures) {
  if (scripts.empty())
    return {};
  std::vector<EditAction> result = scripts[0];
  std::vector<ActionSignature> result_sigs = signatures[0];
  for (size_t k = 1; k < scripts.size(); ++k) {
    const auto &sigs = signatures[k];
    size_t n = result.size(), m = sigs.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;)
      for (size_t j = m; j-- > 0;)
        dp[i][j] = result_sigs[i] == sigs[j]
                       ? dp[i + 1][j + 1] + 1
                       : std::max(dp[i + 1][j], dp[i][j + 1]);
    std::vector<EditAction> kept;
    std::vector<ActionSignature> kept_sigs;
    size_t i = 0, j = 0;
    while (i < n && j < m) {
      if (result_sigs[i] == sigs[j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
        kept.push_back(result[i]);
        kept_sigs.push_back(result_sigs[i]);
        ++i;
        ++j;
      } else if (dp[i + 1][j] >= dp[i][j + 1]) {
        ++i;
      } else {
        ++j;
      }
    }
    if (kept.empty())
      throw EmptyCore("no common edit actions between the canonical instance "
                      "and instance " +
                      std::to_string(k));
    result = std::move(kept);
    result_sigs = std::move(kept_sigs);
  }
  return result;
}

// ---- graph extension --------------------------------------------------------

namespace {

PdgKind anchor_kind_for(const SyntaxTree &tree, NodeId node) {
  const SyntaxNode &n = tree.at(node);
  switch (n.kind) {
  case NodeKind::Name:
  case NodeKind::Literal:
    return PdgKind::Data;
  case NodeKind::ForStmt:
  case NodeKind::WhileStmt:
  case NodeKind::IfStmt:
  case NodeKind::WithStmt:
  case NodeKind::TryStmt:
    return PdgKind::Control;
  default:
    return PdgKind::Operation;
  }
}

PdgSubkind anchor_subkind_for(PdgKind kind) {
  switch (kind) {
  case PdgKind::Data:
    return PdgSubkind::Variable;
  case PdgKind::Control:
    return PdgSubkind::IfCtrl;
  case PdgKind::Operation:
    return PdgSubkind::CallOp;
  }
  return PdgSubkind::Variable;
}

// Covered descendant of `node` with the fewest parent steps back up; ties by
// smallest span start. Variables make poor anchors (occurrence indexes are
// not stable across targets), so any other coverage wins.
struct AnchorBase {
  NodeId base = kNoNode;
  int up = 0;
  std::vector<int> down;
};

bool covered_by_non_variable(const Pdg &pdg, NodeId node) {
  int v = pdg.vertex_for(node);
  return v >= 0 && pdg.vertex(v).subkind != PdgSubkind::Variable &&
         !pdg.vertex(v).anchor;
}

bool covered_at_all(const Pdg &pdg, NodeId node) {
  int v = pdg.vertex_for(node);
  return v >= 0 && !pdg.vertex(v).anchor;
}

AnchorBase find_anchor_base(const Pdg &pdg, const SyntaxTree &tree,
                            NodeId node) {
  // Breadth-first over descendants.
  for (int pass = 0; pass < 2; ++pass) {
    auto covered = pass == 0 ? covered_by_non_variable : covered_at_all;
    std::vector<std::pair<NodeId, int>> frontier{{node, 0}};
    size_t head = 0;
    std::vector<std::pair<int, NodeId>> hits; // (depth, node)
    while (head < frontier.size()) {
      auto [cur, depth] = frontier[head++];
      if (cur != node && covered(pdg, cur)) {
        hits.push_back({depth, cur});
        continue; // no need to descend further on this branch
      }
      for (NodeId child : tree.at(cur).children)
        frontier.push_back({child, depth + 1});
    }
    if (!hits.empty()) {
      std::sort(hits.begin(), hits.end(),
                [&tree](const auto &a, const auto &b) {
                  if (a.first != b.first)
                    return a.first < b.first;
                  return tree.at(a.second).span.begin <
                         tree.at(b.second).span.begin;
                });
      return {hits.front().second, hits.front().first, {}};
    }
  }
  // Fallback: nearest covered ancestor plus the child path down.
  std::vector<int> path;
  NodeId cur = node;
  while (tree.at(cur).parent != kNoNode) {
    NodeId parent = tree.at(cur).parent;
    path.push_back(tree.child_index(cur));
    if (covered_at_all(pdg, parent)) {
      std::reverse(path.begin(), path.end());
      return {parent, 0, path};
    }
    cur = parent;
  }
  return {};
}

} // namespace

Pdg extend_graph(const Pdg &canonical, const SyntaxTree &tree,
                 const std::vector<EditAction> &script) {
  Pdg extended = canonical;
  auto ensure_anchor = [&](NodeId node) {
    if (node == kNoNode || extended.vertex_for(node) >= 0)
      return;
    AnchorBase base = find_anchor_base(extended, tree, node);
    if (base.base == kNoNode)
      throw BundleInvariantViolation(
          "no graph-covered neighbor for extension node");
    PdgNode anchor;
    anchor.id = static_cast<int>(extended.vertices.size());
    anchor.kind = anchor_kind_for(tree, node);
    anchor.subkind = anchor_subkind_for(anchor.kind);
    anchor.label = kind_name(tree.at(node).kind);
    anchor.anchor = true;
    anchor.anchor_node = node;
    anchor.base_node = base.base;
    anchor.up_levels = base.up;
    anchor.down_path = base.down;
    extended.vertices.push_back(anchor);
    extended.vertex_of_syntax.emplace(node, anchor.id);
    int base_vertex = extended.vertex_for(base.base);
    if (base_vertex >= 0)
      extended.edges.push_back({anchor.id, base_vertex, PdgEdgeKind::Control,
                                PdgEdgeLabel::Anchor, 0, kNoNode});
  };

  for (const EditAction &act : script) {
    if (act.target.ref == NodeRef::Existing && act.target.node != kNoNode &&
        (act.op == EditOp::Delete || act.op == EditOp::Update ||
         act.op == EditOp::Move))
      ensure_anchor(act.target.node);
    if ((act.op == EditOp::Insert || act.op == EditOp::Move) &&
        act.parent.ref == NodeRef::Existing && act.parent.node != kNoNode)
      ensure_anchor(act.parent.node);
  }
  return extended;
}

// ---- signatures & generalization -------------------------------------------

namespace {

struct Generalization {
  std::map<std::string, std::string> label_to_placeholder;
};

std::string generalized_label(const Generalization &gen,
                              const std::string &label) {
  auto it = gen.label_to_placeholder.find(label);
  return it == gen.label_to_placeholder.end() ? label : "<" + it->second + ">";
}

// Node kind/label/parent data for signature computation, resolving inserted
// refs through the script itself.
struct ScriptContext {
  const SyntaxTree &tree;
  const std::vector<EditAction> &script;

  NodeKind kind_of(const NodeRef &ref) const {
    if (ref.ref == NodeRef::Inserted)
      return script[ref.action].new_kind;
    return tree.at(ref.node).kind;
  }
  std::string label_of(const NodeRef &ref) const {
    if (ref.ref == NodeRef::Inserted)
      return script[ref.action].label;
    return tree.at(ref.node).label;
  }
  NodeKind parent_kind_of(const NodeRef &ref) const {
    if (ref.ref == NodeRef::Inserted) {
      const EditAction &insert = script[ref.action];
      return kind_of_parent_ref(insert.parent);
    }
    NodeId parent = tree.at(ref.node).parent;
    return parent == kNoNode ? NodeKind::Module : tree.at(parent).kind;
  }
  NodeKind kind_of_parent_ref(const NodeRef &parent) const {
    if (parent.ref == NodeRef::Inserted)
      return script[parent.action].new_kind;
    return tree.at(parent.node).kind;
  }
};

std::vector<ActionSignature>
build_signatures(const std::vector<EditAction> &script, const SyntaxTree &tree,
                 const Generalization &gen) {
  ScriptContext ctx{tree, script};
  std::vector<ActionSignature> sigs;
  for (const EditAction &act : script) {
    std::ostringstream sig;
    sig << edit_op_name(act.op) << "|";
    NodeKind node_kind = NodeKind::Module;
    std::string label;
    NodeKind parent_kind = NodeKind::Module;
    int position = -1;
    switch (act.op) {
    case EditOp::Insert:
      node_kind = act.new_kind;
      label = act.label;
      parent_kind = ctx.kind_of_parent_ref(act.parent);
      position = act.position;
      break;
    case EditOp::Update:
      node_kind = ctx.kind_of(act.target);
      label = act.label;
      parent_kind = ctx.parent_kind_of(act.target);
      break;
    case EditOp::Delete:
      node_kind = ctx.kind_of(act.target);
      label = ctx.label_of(act.target);
      parent_kind = ctx.parent_kind_of(act.target);
      break;
    case EditOp::Move:
      node_kind = ctx.kind_of(act.target);
      label = ctx.label_of(act.target);
      parent_kind = ctx.kind_of_parent_ref(act.parent);
      position = act.position;
      break;
    }
    sig << kind_name(node_kind) << "|" << generalized_label(gen, label) << "|"
        << kind_name(parent_kind) << "|";
    // Position role: statement containers compare without the raw index.
    if (position >= 0)
      sig << (parent_kind == NodeKind::Block || parent_kind == NodeKind::Module
                  ? std::string("stmt")
                  : std::to_string(position));
    sigs.push_back({sig.str()});
  }
  return sigs;
}

// Replace generalizable identifier labels by placeholders in the retained
// canonical script.
void generalize_script(std::vector<EditAction> &script,
                       const Generalization &gen) {
  for (EditAction &act : script) {
    bool name_like = (act.op == EditOp::Insert &&
                      (act.new_kind == NodeKind::Name ||
                       act.new_kind == NodeKind::Attribute)) ||
                     act.op == EditOp::Update;
    if (!name_like)
      continue;
    auto it = gen.label_to_placeholder.find(act.label);
    if (it != gen.label_to_placeholder.end())
      act.placeholder = it->second;
  }
}

// Drop retained actions whose inserted-node references were not retained,
// then renumber the remaining insert references.
std::vector<EditAction> repair_script(std::vector<EditAction> script,
                                      const std::vector<int> &kept_indices) {
  bool changed = true;
  std::vector<bool> alive(script.size(), true);
  std::vector<int> old_of(script.size());
  for (size_t i = 0; i < script.size(); ++i)
    old_of[i] = kept_indices[i];
  while (changed) {
    changed = false;
    std::map<int, int> alive_new_index;
    int counter = 0;
    for (size_t i = 0; i < script.size(); ++i)
      if (alive[i])
        alive_new_index[old_of[i]] = counter++;
    for (size_t i = 0; i < script.size(); ++i) {
      if (!alive[i])
        continue;
      auto ref_ok = [&](const NodeRef &ref) {
        return ref.ref != NodeRef::Inserted ||
               alive_new_index.count(ref.action) > 0;
      };
      if (!ref_ok(script[i].target) || !ref_ok(script[i].parent)) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  std::map<int, int> final_index;
  int counter = 0;
  std::vector<EditAction> out;
  for (size_t i = 0; i < script.size(); ++i) {
    if (!alive[i])
      continue;
    final_index[old_of[i]] = counter++;
    out.push_back(script[i]);
  }
  for (EditAction &act : out) {
    if (act.target.ref == NodeRef::Inserted)
      act.target.action = final_index.at(act.target.action);
    if (act.parent.ref == NodeRef::Inserted)
      act.parent.action = final_index.at(act.parent.action);
  }
  if (out.empty())
    throw EmptyCore("generalized script lost all well-formed actions");
  return out;
}

Generalization build_generalization(const Pdg &pdg,
                                    const std::map<std::string, int> &bound,
                                    const std::map<int, int> *alignment,
                                    const Pdg *instance_pdg) {
  Generalization gen;
  for (const auto &[placeholder, vid] : bound) {
    const PdgNode *v = &pdg.vertex(vid);
    if (alignment != nullptr) {
      auto it = alignment->find(vid);
      if (it == alignment->end())
        continue;
      v = &instance_pdg->vertex(it->second);
    }
    // Whole-label generalization only applies to undotted identifiers; the
    // prefix of a dotted label is generalized through its own root variable.
    if (v->label.find('.') != std::string::npos)
      continue;
    gen.label_to_placeholder.emplace(v->label, placeholder);
  }
  return gen;
}

} // namespace

// ---- compile ---------------------------------------------------------------

PatternBundle compile_pattern(const std::vector<PatternInstance> &instances,
                              const std::string &id,
                              const std::string &description,
                              const BuiltinRegistry &registry) {
  if (instances.empty())
    throw BundleInvariantViolation("a pattern needs at least one instance");

  // Reject instances that cannot align; keep going while one remains.
  std::vector<PatternInstance> kept{instances[0]};
  std::vector<std::map<int, int>> alignments;
  std::string rejection_log;
  for (size_t k = 1; k < instances.size(); ++k) {
    try {
      std::vector<PatternInstance> pair{instances[0], instances[k]};
      auto maps = align_instances(pair);
      alignments.push_back(maps.at(0));
      kept.push_back(instances[k]);
    } catch (const AlignmentFailure &failure) {
      rejection_log += std::string(failure.what()) + "\n";
    }
  }
  if (kept.empty())
    throw AlignmentFailure(0, "all instances rejected:\n" + rejection_log);

  const Pdg &canonical = kept[0].before_pdg;
  std::map<int, MatchingMode> modes =
      assign_matching_modes(canonical, kept, alignments, registry);

  // Placeholders for generalized identifiers, in vertex-id order.
  std::map<std::string, int> bound_names;
  int counter = 0;
  for (const PdgNode &v : canonical.vertices) {
    auto it = modes.find(v.id);
    if (it == modes.end())
      continue;
    if (it->second.variant == MatchingMode::MatchAnyLabel ||
        it->second.variant == MatchingMode::MatchLongestCommonSuffix)
      bound_names["v" + std::to_string(++counter)] = v.id;
  }

  // Per-instance scripts and signatures.
  std::vector<std::vector<EditAction>> scripts;
  std::vector<std::vector<ActionSignature>> signatures;
  for (size_t k = 0; k < kept.size(); ++k) {
    NodeMapping mapping = match_trees(*kept[k].before_tree, *kept[k].after_tree);
    std::vector<EditAction> script =
        compute_edit_script(*kept[k].before_tree, *kept[k].after_tree, mapping);
    Generalization gen = build_generalization(
        canonical, bound_names, k == 0 ? nullptr : &alignments[k - 1],
        k == 0 ? nullptr : &kept[k].before_pdg);
    signatures.push_back(build_signatures(script, *kept[k].before_tree, gen));
    scripts.push_back(std::move(script));
  }

  // Fold to the common core, tracking which canonical actions survive.
  std::vector<int> kept_indices(scripts[0].size());
  for (size_t i = 0; i < kept_indices.size(); ++i)
    kept_indices[i] = static_cast<int>(i);
  std::vector<EditAction> core = scripts[0];
  std::vector<ActionSignature> core_sigs = signatures[0];
  for (size_t k = 1; k < scripts.size(); ++k) {
    std::vector<std::vector<EditAction>> pair_scripts{core, scripts[k]};
    std::vector<std::vector<ActionSignature>> pair_sigs{core_sigs,
                                                        signatures[k]};
    std::vector<EditAction> folded = generalized_lcs(pair_scripts, pair_sigs);
    // Recompute retained indices/signatures against the previous core.
    std::vector<int> new_kept;
    std::vector<ActionSignature> new_sigs;
    size_t cursor = 0;
    for (size_t i = 0; i < core.size() && cursor < folded.size(); ++i) {
      // EditAction has no operator==; compare via signature plus identity of
      // ref fields.
      const EditAction &a = core[i];
      const EditAction &b = folded[cursor];
      if (a.op == b.op && a.target == b.target && a.parent == b.parent &&
          a.position == b.position && a.label == b.label &&
          a.new_kind == b.new_kind) {
        new_kept.push_back(kept_indices[i]);
        new_sigs.push_back(core_sigs[i]);
        ++cursor;
      }
    }
    core = std::move(folded);
    core_sigs = std::move(new_sigs);
    kept_indices = std::move(new_kept);
  }

  Generalization canonical_gen = build_generalization(
      canonical, bound_names, nullptr, nullptr);
  core = repair_script(std::move(core), kept_indices);
  generalize_script(core, canonical_gen);

  PatternBundle bundle;
  bundle.id = id;
  bundle.description = description;
  bundle.canonical_source = kept[0].before_source;
  bundle.canonical_tree = kept[0].before_tree;
  bundle.graph = extend_graph(canonical, *kept[0].before_tree, core);
  bundle.graph.tree = bundle.canonical_tree.get();
  bundle.modes = std::move(modes);
  bundle.script = std::move(core);
  bundle.bound_names = std::move(bound_names);

  // ---- bundle invariants ----
  for (const PdgNode &v : bundle.graph.vertices) {
    if (v.kind == PdgKind::Data && !v.anchor && !bundle.modes.count(v.id))
      throw BundleInvariantViolation("data vertex " + std::to_string(v.id) +
                                     " has no matching mode");
    if (v.anchor && bundle.modes.count(v.id))
      throw BundleInvariantViolation("anchor vertex carries a mode");
  }
  for (size_t i = 0; i < bundle.script.size(); ++i) {
    auto check_ref = [&](const NodeRef &ref) {
      if (ref.ref == NodeRef::Inserted)
        return ref.action >= 0 && ref.action < static_cast<int>(i);
      return ref.node == kNoNode || bundle.canonical_tree->valid(ref.node);
    };
    if (!check_ref(bundle.script[i].target) ||
        !check_ref(bundle.script[i].parent))
      throw BundleInvariantViolation("script action " + std::to_string(i) +
                                     " has a dangling reference");
  }
  // Self-match: the bundle must match its own canonical instance.
  MatchResult self = find_matches(bundle, kept[0].before_pdg);
  if (self.matches.empty())
    throw BundleInvariantViolation(
        "compiled bundle does not match its own canonical instance");

  return bundle;
}

} // namespace pdgfix
