#include "pdgfix/bundleio.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdgfix/errors.hpp"

namespace pdgfix {

namespace {

using nlohmann::json;

json ref_to_json(const NodeRef &ref) {
  json out;
  if (ref.ref == NodeRef::Inserted)
    out["action"] = ref.action;
  else
    out["node"] = ref.node;
  return out;
}

NodeRef ref_from_json(const json &j) {
  if (j.contains("action"))
    return NodeRef::inserted(j.at("action").get<int>());
  return NodeRef::existing(j.at("node").get<NodeId>());
}

PdgKind pdg_kind_from_name(const std::string &name) {
  if (name == "data")
    return PdgKind::Data;
  if (name == "operation")
    return PdgKind::Operation;
  if (name == "control")
    return PdgKind::Control;
  throw SchemaError("unknown vertex kind '" + name + "'");
}

PdgSubkind pdg_subkind_from_name(const std::string &name) {
  static const std::pair<const char *, PdgSubkind> table[] = {
      {"variable", PdgSubkind::Variable},
      {"literal", PdgSubkind::LiteralValue},
      {"function-ref", PdgSubkind::FunctionRef},
      {"call", PdgSubkind::CallOp},
      {"assign", PdgSubkind::AssignOp},
      {"aug-assign", PdgSubkind::AugAssignOp},
      {"bin-op", PdgSubkind::BinaryOp},
      {"compare", PdgSubkind::CompareOp},
      {"subscript-load", PdgSubkind::SubscriptLoad},
      {"subscript-store", PdgSubkind::SubscriptStore},
      {"attribute-load", PdgSubkind::AttributeLoad},
      {"for", PdgSubkind::ForCtrl},
      {"while", PdgSubkind::WhileCtrl},
      {"if", PdgSubkind::IfCtrl},
      {"with", PdgSubkind::WithCtrl},
      {"try", PdgSubkind::TryCtrl},
  };
  for (const auto &[n, v] : table)
    if (name == n)
      return v;
  throw SchemaError("unknown vertex subkind '" + name + "'");
}

PdgEdgeLabel edge_label_from_name(const std::string &name) {
  static const std::pair<const char *, PdgEdgeLabel> table[] = {
      {"def", PdgEdgeLabel::Def},
      {"use", PdgEdgeLabel::Use},
      {"recv", PdgEdgeLabel::Recv},
      {"para", PdgEdgeLabel::Para},
      {"qual", PdgEdgeLabel::Qual},
      {"dep", PdgEdgeLabel::Dep},
      {"true-branch", PdgEdgeLabel::TrueBranch},
      {"false-branch", PdgEdgeLabel::FalseBranch},
      {"anchor", PdgEdgeLabel::Anchor},
  };
  for (const auto &[n, v] : table)
    if (name == n)
      return v;
  throw SchemaError("unknown edge label '" + name + "'");
}

MatchingMode::Variant mode_from_name(const std::string &name) {
  if (name == "match_original_labels")
    return MatchingMode::MatchOriginalLabels;
  if (name == "match_any_label")
    return MatchingMode::MatchAnyLabel;
  if (name == "match_longest_common_suffix")
    return MatchingMode::MatchLongestCommonSuffix;
  throw SchemaError("unknown matching mode '" + name + "'");
}

EditOp edit_op_from_name(const std::string &name) {
  if (name == "insert")
    return EditOp::Insert;
  if (name == "delete")
    return EditOp::Delete;
  if (name == "update")
    return EditOp::Update;
  if (name == "move")
    return EditOp::Move;
  throw SchemaError("unknown edit op '" + name + "'");
}

} // namespace

std::string bundle_to_json(const PatternBundle &bundle) {
  json j;
  j["schema_version"] = bundle.schema_version;
  j["id"] = bundle.id;
  j["description"] = bundle.description;
  j["canonical_source"] = bundle.canonical_source;

  json vertices = json::array();
  for (const PdgNode &v : bundle.graph.vertices) {
    json vj;
    vj["id"] = v.id;
    vj["kind"] = pdg_kind_name(v.kind);
    vj["subkind"] = pdg_subkind_name(v.subkind);
    vj["label"] = v.label;
    vj["syntax_refs"] = v.syntax_refs;
    if (v.anchor) {
      vj["anchor"] = true;
      vj["anchor_node"] = v.anchor_node;
      vj["base_node"] = v.base_node;
      vj["up"] = v.up_levels;
      vj["down"] = v.down_path;
    }
    vertices.push_back(std::move(vj));
  }
  json edges = json::array();
  for (const PdgEdge &e : bundle.graph.edges) {
    json ej;
    ej["src"] = e.src;
    ej["dst"] = e.dst;
    ej["kind"] = e.kind == PdgEdgeKind::Control ? "control" : "data";
    ej["label"] = pdg_edge_label_name(e.label);
    ej["position"] = e.position;
    if (e.occurrence != kNoNode)
      ej["occurrence"] = e.occurrence;
    edges.push_back(std::move(ej));
  }
  j["graph"] = {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}};

  json modes = json::object();
  for (const auto &[vid, mode] : bundle.modes) {
    json mj;
    mj["variant"] = matching_mode_name(mode.variant);
    if (!mode.suffix.empty())
      mj["suffix"] = mode.suffix;
    modes[std::to_string(vid)] = std::move(mj);
  }
  j["modes"] = std::move(modes);

  json script = json::array();
  for (const EditAction &act : bundle.script) {
    json aj;
    aj["op"] = edit_op_name(act.op);
    switch (act.op) {
    case EditOp::Insert:
      aj["kind"] = kind_name(act.new_kind);
      aj["label"] = act.label;
      aj["parent"] = ref_to_json(act.parent);
      aj["position"] = act.position;
      break;
    case EditOp::Delete:
      aj["target"] = ref_to_json(act.target);
      break;
    case EditOp::Update:
      aj["target"] = ref_to_json(act.target);
      aj["label"] = act.label;
      break;
    case EditOp::Move:
      aj["target"] = ref_to_json(act.target);
      aj["parent"] = ref_to_json(act.parent);
      aj["position"] = act.position;
      break;
    }
    if (!act.placeholder.empty())
      aj["placeholder"] = act.placeholder;
    script.push_back(std::move(aj));
  }
  j["script"] = std::move(script);

  json bound = json::object();
  for (const auto &[placeholder, vid] : bundle.bound_names)
    bound[placeholder] = vid;
  j["bound_names"] = std::move(bound);

  return j.dump(2) + "\n";
}

PatternBundle bundle_from_json(const std::string &json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  try {
    PatternBundle bundle;
    bundle.schema_version = j.at("schema_version").get<int>();
    if (bundle.schema_version > PatternBundle::kSchemaVersion)
      throw VersionError("bundle schema_version " +
                         std::to_string(bundle.schema_version) +
                         " is newer than supported version " +
                         std::to_string(PatternBundle::kSchemaVersion));
    bundle.id = j.at("id").get<std::string>();
    bundle.description = j.at("description").get<std::string>();
    bundle.canonical_source = j.at("canonical_source").get<std::string>();
    try {
      bundle.canonical_tree =
          std::make_shared<SyntaxTree>(parse_source(bundle.canonical_source));
    } catch (const ParseError &e) {
      throw SchemaError(std::string("canonical_source does not parse: ") +
                        e.what());
    }
    NodeId node_count = static_cast<NodeId>(bundle.canonical_tree->nodes.size());
    auto check_node = [&](NodeId id, const char *what) {
      if (id < 0 || id >= node_count)
        throw SchemaError(std::string(what) + " references syntax node " +
                          std::to_string(id) + " outside the canonical tree");
    };

    const json &graph = j.at("graph");
    for (const json &vj : graph.at("vertices")) {
      PdgNode v;
      v.id = vj.at("id").get<int>();
      v.kind = pdg_kind_from_name(vj.at("kind").get<std::string>());
      v.subkind = pdg_subkind_from_name(vj.at("subkind").get<std::string>());
      v.label = vj.at("label").get<std::string>();
      for (const json &r : vj.at("syntax_refs")) {
        NodeId id = r.get<NodeId>();
        check_node(id, "vertex");
        v.syntax_refs.push_back(id);
      }
      if (vj.value("anchor", false)) {
        v.anchor = true;
        v.anchor_node = vj.at("anchor_node").get<NodeId>();
        v.base_node = vj.at("base_node").get<NodeId>();
        v.up_levels = vj.value("up", 0);
        for (const json &d : vj.value("down", json::array()))
          v.down_path.push_back(d.get<int>());
        check_node(v.anchor_node, "anchor");
        check_node(v.base_node, "anchor base");
      }
      if (v.id != static_cast<int>(bundle.graph.vertices.size()))
        throw SchemaError("vertex ids must be dense and ordered");
      bundle.graph.vertices.push_back(v);
      for (NodeId ref : bundle.graph.vertices.back().syntax_refs)
        bundle.graph.vertex_of_syntax.emplace(ref, v.id);
      if (v.anchor)
        bundle.graph.vertex_of_syntax.emplace(v.anchor_node, v.id);
    }
    int vertex_count = static_cast<int>(bundle.graph.vertices.size());
    for (const json &ej : graph.at("edges")) {
      PdgEdge e;
      e.src = ej.at("src").get<int>();
      e.dst = ej.at("dst").get<int>();
      if (e.src < 0 || e.src >= vertex_count || e.dst < 0 ||
          e.dst >= vertex_count)
        throw SchemaError("edge references a missing vertex");
      e.kind = ej.at("kind").get<std::string>() == "control"
                   ? PdgEdgeKind::Control
                   : PdgEdgeKind::Data;
      e.label = edge_label_from_name(ej.at("label").get<std::string>());
      e.position = ej.value("position", 0);
      e.occurrence = ej.value("occurrence", kNoNode);
      if (e.occurrence != kNoNode)
        check_node(e.occurrence, "edge occurrence");
      bundle.graph.edges.push_back(e);
    }
    bundle.graph.tree = bundle.canonical_tree.get();

    for (const auto &[key, mj] : j.at("modes").items()) {
      int vid = std::stoi(key);
      if (vid < 0 || vid >= vertex_count)
        throw SchemaError("mode references a missing vertex");
      MatchingMode mode;
      mode.variant = mode_from_name(mj.at("variant").get<std::string>());
      mode.suffix = mj.value("suffix", "");
      bundle.modes[vid] = mode;
    }

    int action_index = 0;
    for (const json &aj : j.at("script")) {
      EditAction act;
      act.op = edit_op_from_name(aj.at("op").get<std::string>());
      auto check_ref = [&](const NodeRef &ref) {
        if (ref.ref == NodeRef::Inserted) {
          if (ref.action < 0 || ref.action >= action_index)
            throw SchemaError("action " + std::to_string(action_index) +
                              ": reference to a later or missing insert");
        } else {
          if (ref.node < 0 || ref.node >= node_count)
            throw SchemaError("action " + std::to_string(action_index) +
                              ": dangling syntax node reference " +
                              std::to_string(ref.node));
        }
      };
      switch (act.op) {
      case EditOp::Insert: {
        auto kind = kind_from_name(aj.at("kind").get<std::string>());
        if (!kind)
          throw SchemaError("action " + std::to_string(action_index) +
                            ": unknown node kind");
        act.new_kind = *kind;
        act.label = aj.at("label").get<std::string>();
        act.parent = ref_from_json(aj.at("parent"));
        act.position = aj.at("position").get<int>();
        check_ref(act.parent);
        break;
      }
      case EditOp::Delete:
        act.target = ref_from_json(aj.at("target"));
        check_ref(act.target);
        break;
      case EditOp::Update:
        act.target = ref_from_json(aj.at("target"));
        act.label = aj.at("label").get<std::string>();
        check_ref(act.target);
        break;
      case EditOp::Move:
        act.target = ref_from_json(aj.at("target"));
        act.parent = ref_from_json(aj.at("parent"));
        act.position = aj.at("position").get<int>();
        check_ref(act.target);
        check_ref(act.parent);
        break;
      }
      act.placeholder = aj.value("placeholder", "");
      bundle.script.push_back(std::move(act));
      ++action_index;
    }

    for (const auto &[placeholder, vj] : j.at("bound_names").items()) {
      int vid = vj.get<int>();
      if (vid < 0 || vid >= vertex_count)
        throw SchemaError("bound name references a missing vertex");
      bundle.bound_names[placeholder] = vid;
    }
    return bundle;
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed bundle: ") + e.what());
  }
}

void save_bundle(const PatternBundle &bundle,
                 const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << bundle_to_json(bundle);
  if (!out)
    throw IoError("failed writing " + path.string());
}

PatternBundle load_bundle(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return bundle_from_json(buffer.str());
}

std::vector<PatternBundle>
load_pattern_set(const std::filesystem::path &directory, bool strict,
                 std::vector<PatternSetDiagnostic> *diagnostics) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw IoError("pattern directory does not exist: " + directory.string());
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(directory)) {
    std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 13 &&
        name.substr(name.size() - 13) == ".pattern.json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<PatternBundle> bundles;
  for (const fs::path &file : files) {
    try {
      bundles.push_back(load_bundle(file));
    } catch (const DuplicateId &) {
      throw;
    } catch (const std::exception &e) {
      if (strict)
        throw;
      if (diagnostics)
        diagnostics->push_back({file, e.what()});
    }
  }
  std::sort(bundles.begin(), bundles.end(),
            [](const PatternBundle &a, const PatternBundle &b) {
              return a.id < b.id;
            });
  for (size_t i = 1; i < bundles.size(); ++i)
    if (bundles[i].id == bundles[i - 1].id)
      throw DuplicateId("duplicate pattern id '" + bundles[i].id + "'");
  return bundles;
}

} // namespace pdgfix
