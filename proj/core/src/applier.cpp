#include "pdgfix/applier.hpp"

#include <unordered_map>

#include "pdgfix/errors.hpp"
#include "pdgfix/treediff.hpp"

namespace pdgfix {

namespace {

PdgKind anchor_bucket(const SyntaxTree &tree, NodeId node) {
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

class Remapper {
public:
  Remapper(const PatternBundle &bundle, const Finding &finding,
           const Pdg &target)
      : bundle_(bundle), finding_(finding), target_(target),
        ct_(*bundle.canonical_tree), tt_(*target.tree) {
    build_node_map();
  }

  std::vector<EditAction> run() {
    SyntaxTree wc = ct_; // canonical side simulation
    SyntaxTree wt = tt_; // target side simulation
    const std::vector<EditAction> &script = bundle_.script;
    std::vector<NodeId> c_inserted(script.size(), kNoNode);
    std::vector<NodeId> t_inserted(script.size(), kNoNode);
    std::vector<EditAction> out;

    auto lookup = [&](NodeId cnode, int index) -> NodeId {
      auto it = work_map_.find(cnode);
      if (it != work_map_.end())
        return it->second;
      return resolve(cnode, index);
    };
    auto lookup_soft = [&](NodeId cnode) -> NodeId {
      auto it = work_map_.find(cnode);
      if (it != work_map_.end())
        return it->second;
      try {
        return resolve(cnode, -1);
      } catch (const RemapFailure &) {
        return kNoNode;
      }
    };

    // Maps a canonical child position onto the corresponding target child
    // position via the sibling occupying that slot.
    auto map_position = [&](NodeId cparent, NodeId tparent, int cpos,
                            int index) -> int {
      const auto &cc = wc.at(cparent).children;
      const auto &tc = wt.at(tparent).children;
      if (cpos >= static_cast<int>(cc.size()))
        return static_cast<int>(tc.size());
      NodeId csib = cc[static_cast<size_t>(cpos)];
      NodeId tsib = lookup_soft(csib);
      if (tsib != kNoNode && wt.at(tsib).parent == tparent) {
        int idx = wt.child_index(tsib);
        if (idx >= 0)
          return idx;
      }
      if (cpos == 0)
        return 0;
      NodeId cprev = cc[static_cast<size_t>(cpos) - 1];
      NodeId tprev = lookup_soft(cprev);
      if (tprev != kNoNode && wt.at(tprev).parent == tparent) {
        int idx = wt.child_index(tprev);
        if (idx >= 0)
          return idx + 1;
      }
      throw RemapFailure(index, "cannot locate the insertion slot in the "
                                "matched code");
    };

    for (size_t i = 0; i < script.size(); ++i) {
      int index = static_cast<int>(i);
      const EditAction &act = script[i];
      EditAction r = act;

      // Rebind generalized labels through the match.
      std::string target_label = act.label;
      if (!act.placeholder.empty()) {
        auto it = finding_.iso.binding.find(act.placeholder);
        if (it == finding_.iso.binding.end())
          throw RemapFailure(index, "unbound placeholder <" +
                                        act.placeholder + ">");
        target_label = it->second;
      }
      r.label = target_label;
      r.placeholder.clear();

      switch (act.op) {
      case EditOp::Insert: {
        NodeId cparent = act.parent.ref == NodeRef::Inserted
                             ? c_inserted[act.parent.action]
                             : act.parent.node;
        NodeId tparent;
        if (act.parent.ref == NodeRef::Inserted) {
          tparent = t_inserted[act.parent.action];
        } else {
          tparent = lookup(cparent, index);
          r.parent = NodeRef::existing(tparent);
        }
        int tpos = map_position(cparent, tparent, act.position, index);
        r.position = tpos;
        NodeId fresh_c = wc.make_node(act.new_kind, act.label);
        wc.insert_child(cparent, fresh_c,
                        static_cast<size_t>(std::min<int>(
                            act.position,
                            static_cast<int>(wc.at(cparent).children.size()))));
        NodeId fresh_t = wt.make_node(act.new_kind, target_label);
        wt.insert_child(tparent, fresh_t, static_cast<size_t>(tpos));
        c_inserted[i] = fresh_c;
        t_inserted[i] = fresh_t;
        work_map_[fresh_c] = fresh_t;
        break;
      }
      case EditOp::Delete: {
        NodeId cnode = act.target.ref == NodeRef::Inserted
                           ? c_inserted[act.target.action]
                           : act.target.node;
        NodeId tnode;
        if (act.target.ref == NodeRef::Inserted) {
          tnode = t_inserted[act.target.action];
        } else {
          tnode = lookup(cnode, index);
          r.target = NodeRef::existing(tnode);
        }
        wc.detach(cnode);
        wt.detach(tnode);
        break;
      }
      case EditOp::Update: {
        NodeId cnode = act.target.ref == NodeRef::Inserted
                           ? c_inserted[act.target.action]
                           : act.target.node;
        NodeId tnode;
        if (act.target.ref == NodeRef::Inserted) {
          tnode = t_inserted[act.target.action];
        } else {
          tnode = lookup(cnode, index);
          r.target = NodeRef::existing(tnode);
        }
        wc.at(cnode).label = act.label;
        wt.at(tnode).label = target_label;
        break;
      }
      case EditOp::Move: {
        NodeId cnode = act.target.ref == NodeRef::Inserted
                           ? c_inserted[act.target.action]
                           : act.target.node;
        NodeId tnode;
        if (act.target.ref == NodeRef::Inserted) {
          tnode = t_inserted[act.target.action];
        } else {
          tnode = lookup(cnode, index);
          r.target = NodeRef::existing(tnode);
        }
        NodeId cparent = act.parent.ref == NodeRef::Inserted
                             ? c_inserted[act.parent.action]
                             : act.parent.node;
        NodeId tparent;
        if (act.parent.ref == NodeRef::Inserted) {
          tparent = t_inserted[act.parent.action];
        } else {
          tparent = lookup(cparent, index);
          r.parent = NodeRef::existing(tparent);
        }
        if (wt.is_ancestor(tnode, tparent))
          throw RemapFailure(index, "move target contains its destination");
        wc.detach(cnode);
        wt.detach(tnode);
        int tpos = map_position(cparent, tparent, act.position, index);
        r.position = tpos;
        wc.insert_child(cparent, cnode,
                        static_cast<size_t>(std::min<int>(
                            act.position,
                            static_cast<int>(wc.at(cparent).children.size()))));
        wt.insert_child(tparent, tnode, static_cast<size_t>(tpos));
        break;
      }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

private:
  // Seed the canonical->target node correspondence from the isomorphism:
  // per-edge use sites first, then structural refs of non-variable vertices.
  void build_node_map() {
    const Pdg &pg = bundle_.graph;
    for (const auto &[pei, tei] : finding_.iso.edge_map) {
      const PdgEdge &pe = pg.edges[static_cast<size_t>(pei)];
      const PdgEdge &te = target_.edges[static_cast<size_t>(tei)];
      if (pe.occurrence != kNoNode && te.occurrence != kNoNode)
        work_map_.emplace(pe.occurrence, te.occurrence);
    }
    for (const auto &[pv, tv] : finding_.iso.vertex_map) {
      const PdgNode &p = pg.vertex(pv);
      const PdgNode &t = target_.vertex(tv);
      if (p.anchor || p.subkind == PdgSubkind::Variable)
        continue;
      size_t n = std::min(p.syntax_refs.size(), t.syntax_refs.size());
      for (size_t i = 0; i < n; ++i)
        work_map_.emplace(p.syntax_refs[i], t.syntax_refs[i]);
    }
  }

  // Resolves a canonical parse-tree node: direct correspondence or anchor
  // walk (base node, then up/down the target tree).
  NodeId resolve(NodeId cnode, int index) {
    int v = bundle_.graph.vertex_for(cnode);
    if (v >= 0 && bundle_.graph.vertex(v).anchor) {
      const PdgNode &a = bundle_.graph.vertex(v);
      auto it = work_map_.find(a.base_node);
      if (it == work_map_.end())
        throw RemapFailure(index < 0 ? 0 : index,
                           "anchor base has no target counterpart");
      NodeId cur = it->second;
      for (int step = 0; step < a.up_levels; ++step) {
        cur = tt_.at(cur).parent;
        if (cur == kNoNode)
          throw RemapFailure(index < 0 ? 0 : index,
                             "anchor walk left the target tree");
      }
      for (int child_index : a.down_path) {
        const auto &kids = tt_.at(cur).children;
        if (child_index < 0 || child_index >= static_cast<int>(kids.size()))
          throw RemapFailure(index < 0 ? 0 : index,
                             "anchor walk does not fit the target shape");
        cur = kids[static_cast<size_t>(child_index)];
      }
      if (anchor_bucket(tt_, cur) != a.kind)
        throw RemapFailure(index < 0 ? 0 : index,
                           "anchor resolved to an incompatible node kind");
      work_map_.emplace(cnode, cur);
      return cur;
    }
    throw RemapFailure(index < 0 ? 0 : index,
                       "canonical node has no target counterpart");
  }

  const PatternBundle &bundle_;
  const Finding &finding_;
  const Pdg &target_;
  const SyntaxTree &ct_;
  const SyntaxTree &tt_;
  std::unordered_map<NodeId, NodeId> work_map_;
};

} // namespace

std::vector<EditAction> remap_script(const PatternBundle &bundle,
                                     const Finding &finding,
                                     const Pdg &target) {
  return Remapper(bundle, finding, target).run();
}

std::string apply_fix(const std::string &source, const SyntaxTree &tree,
                      const Finding &finding, const PatternBundle &bundle,
                      const Pdg &target) {
  try {
    std::vector<EditAction> script = remap_script(bundle, finding, target);
    ApplyResult applied = apply_edit_script(tree, script);
    std::string rendered = render(applied.tree, source, applied.touched);
    parse_source(rendered); // parse-safety gate
    return rendered;
  } catch (const std::exception &) {
    return source; // transactional: any failure leaves the input unchanged
  }
}

} // namespace pdgfix
