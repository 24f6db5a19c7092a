// Acceptance suite: one pass/fail line per criterion. Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pdgfix/applier.hpp"
#include "pdgfix/bundleio.hpp"
#include "pdgfix/driver.hpp"
#include "pdgfix/patterncompile.hpp"
#include "pdgfix/treediff.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace pdgfix;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using testsupport::brute_force_matches;
using testsupport::corpus_files;
using testsupport::mutate_tree;
using testsupport::slurp;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string &label,
            const std::string &detail = "") {
  std::printf("criterion %d: %s  %s%s%s\n", criterion, ok ? "PASS" : "FAIL",
              label.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok)
    ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<PatternBundle> bundles;

const PatternBundle *bundle_named(const std::string &id) {
  for (const PatternBundle &b : bundles)
    if (b.id == id)
      return &b;
  return nullptr;
}

std::string expected_pattern_for(const std::string &filename) {
  const std::pair<const char *, const char *> map[] = {
      {"fig2_", "use-enumerate"},
      {"pos_enumerate", "use-enumerate"},
      {"pos_dictkeys", "dict-keys-in"},
      {"pos_type", "type-compare-isinstance"},
      {"pos_notin", "not-in"},
      {"pos_len", "len-zero-falsy"},
      {"pos_eqnone", "eq-none-is"},
      {"pos_sum", "sum-loop"},
      {"pos_mutable", "mutable-default-arg"},
      {"pos_assert", "assert-equal-rename"},
  };
  for (const auto &[prefix, pattern] : map)
    if (filename.rfind(prefix, 0) == 0)
      return pattern;
  return "";
}

// ---- criterion 1: Fig. 2 end to end ---------------------------------------

void criterion_1() {
  auto start = Clock::now();
  bool ok = true;
  std::string detail;
  fs::path file = fs::path(PDGFIX_CORPUS_DIR) / "positives" /
                  "fig2_enumerate.py";
  std::string source = slurp(file);
  FileAnalysis analysis = analyze_source(file.string(), source, bundles);
  const FileAnalysis::Located *hit = nullptr;
  for (const auto &located : analysis.findings)
    if (located.finding.pattern_id == "use-enumerate")
      hit = &located;
  if (hit == nullptr) {
    ok = false;
    detail = "no use-enumerate finding";
  } else {
    LineIndex lines(source);
    std::set<int> span_lines;
    for (const Span &span : hit->finding.spans)
      span_lines.insert(lines.line_of(span.begin));
    if (span_lines.size() < 2 || span_lines.count(2) == 0) {
      ok = false;
      detail = "highlight spans miss the data definition line";
    }
    std::string fixed =
        apply_fix(source, *analysis.tree, hit->finding, *bundle_named(
            "use-enumerate"), analysis.unit_graphs[hit->unit]);
    if (fixed == source) {
      ok = false;
      detail = "fix did not apply";
    } else {
      try {
        parse_source(fixed);
      } catch (const ParseError &) {
        ok = false;
        detail = "fixed file does not parse";
      }
      if (ok && fixed.find("enumerate(") == std::string::npos) {
        ok = false;
        detail = "fixed loop is not enumerate-based";
      }
      FileAnalysis re = analyze_source(file.string(), fixed, bundles);
      for (const auto &located : re.findings)
        if (located.finding.pattern_id == "use-enumerate")
          ok = false;
    }
  }
  double elapsed = seconds_since(start);
  if (elapsed >= 1.0) {
    ok = false;
    detail = "took " + std::to_string(elapsed) + "s";
  }
  report(1, ok, "Fig. 2 end-to-end detect+fix under 1s", detail);
}

// ---- criterion 2: diff apply-equivalence ------------------------------------

void criterion_2() {
  auto start = Clock::now();
  std::vector<fs::path> files = corpus_files("positives");
  std::mt19937 rng(20240817);
  int passed = 0;
  for (int i = 0; i < 200; ++i) {
    SyntaxTree before = parse_source(slurp(files[i % files.size()]));
    SyntaxTree after = mutate_tree(before, rng, 1 + static_cast<int>(rng() % 5));
    NodeMapping mapping = match_trees(before, after);
    std::vector<EditAction> script =
        compute_edit_script(before, after, mapping);
    ApplyResult applied = apply_edit_script(before, script);
    if (structural_equal(applied.tree, after))
      ++passed;
  }
  double elapsed = seconds_since(start);
  report(2, passed == 200 && elapsed < 30.0,
         "apply-equivalence on 200 randomized pairs",
         std::to_string(passed) + "/200 in " + std::to_string(elapsed) + "s");
}

// ---- criterion 3: matcher oracle equivalence --------------------------------

void criterion_3() {
  int compared = 0;
  int agreements = 0;
  for (const auto &file : corpus_files()) {
    std::string source = slurp(file);
    SyntaxTree tree;
    try {
      tree = parse_source(source);
    } catch (const ParseError &) {
      continue;
    }
    for (const FunctionUnit &unit : function_units(tree)) {
      Pdg graph = build_fgpdg(tree, unit.node);
      if (graph.vertices.size() > 10)
        continue;
      for (const PatternBundle &bundle : bundles) {
        MatchResult result = find_matches(bundle, graph);
        if (result.budget_exceeded)
          continue;
        std::vector<std::map<int, int>> expected =
            brute_force_matches(bundle, graph);
        ++compared;
        bool same = result.matches.size() == expected.size();
        if (same)
          for (size_t i = 0; i < expected.size(); ++i)
            if (result.matches[i].vertex_map != expected[i])
              same = false;
        if (same)
          ++agreements;
      }
    }
  }
  report(3, compared > 0 && agreements == compared,
         "matcher equals brute force on <=10-vertex graphs",
         std::to_string(agreements) + "/" + std::to_string(compared) +
             " (bundle x function) pairs");
}

// ---- criterion 4: mode assignment fidelity ----------------------------------

void criterion_4() {
  bool ok = true;
  std::string detail;
  auto mode_for = [&](std::vector<std::pair<std::string, std::string>> pairs,
                      const std::string &canonical_label) -> MatchingMode {
    std::vector<PatternInstance> instances;
    for (auto &[before, after] : pairs)
      instances.push_back(make_instance(before, after));
    auto alignments = align_instances(instances);
    auto modes =
        assign_matching_modes(instances[0].before_pdg, instances, alignments,
                              BuiltinRegistry::standard());
    for (const PdgNode &v : instances[0].before_pdg.vertices)
      if (v.kind == PdgKind::Data && v.label == canonical_label)
        return modes.at(v.id);
    ok = false;
    detail = "vertex " + canonical_label + " missing";
    return {};
  };

  MatchingMode any_mode = mode_for(
      {{"def a(lst):\n    lst.pop()\n", "def a(lst):\n    lst.clear()\n"},
       {"def b(data):\n    data.pop()\n", "def b(data):\n    data.clear()\n"},
       {"def c(items):\n    items.pop()\n",
        "def c(items):\n    items.clear()\n"}},
      "lst");
  if (any_mode.variant != MatchingMode::MatchAnyLabel) {
    ok = false;
    detail = "lst/data/items did not map to match_any_label";
  }
  MatchingMode suffix_mode = mode_for(
      {{"def a(dict):\n    dict.keys()\n", "def a(dict):\n    dict.items()\n"},
       {"def b(vocab):\n    vocab.keys()\n",
        "def b(vocab):\n    vocab.items()\n"}},
      "dict.keys");
  if (suffix_mode.variant != MatchingMode::MatchLongestCommonSuffix ||
      suffix_mode.suffix != ".keys") {
    ok = false;
    detail = "dict.keys/vocab.keys did not map to suffix(.keys)";
  }
  MatchingMode original_mode = mode_for(
      {{"def a(x):\n    np.log(x)\n", "def a(x):\n    np.log2(x)\n"},
       {"def b(y):\n    np.log(y)\n", "def b(y):\n    np.log2(y)\n"}},
      "np.log");
  if (original_mode.variant != MatchingMode::MatchOriginalLabels) {
    ok = false;
    detail = "np.log twice did not map to match_original_labels";
  }
  report(4, ok, "matching-mode assignment on the three reference examples",
         detail);
}

// ---- criterion 5: corpus recall / precision ---------------------------------

void criterion_5() {
  int positives = 0, detected = 0;
  std::string missed;
  for (const auto &file : corpus_files("positives")) {
    std::string want = expected_pattern_for(file.filename().string());
    if (want.empty())
      continue;
    ++positives;
    FileAnalysis analysis =
        analyze_source(file.string(), slurp(file), bundles);
    bool hit = false;
    for (const auto &located : analysis.findings)
      if (located.finding.pattern_id == want)
        hit = true;
    if (hit)
      ++detected;
    else
      missed += file.filename().string() + " ";
  }
  int negative_files = 0, negative_findings = 0;
  for (const auto &file : corpus_files("negatives")) {
    ++negative_files;
    FileAnalysis analysis =
        analyze_source(file.string(), slurp(file), bundles);
    negative_findings += static_cast<int>(analysis.findings.size());
  }
  bool ok = positives >= 18 && detected == positives && negative_files >= 20 &&
            negative_findings == 0;
  report(5, ok, "corpus recall 100% and zero near-miss findings",
         std::to_string(detected) + "/" + std::to_string(positives) +
             " positives, " + std::to_string(negative_findings) +
             " findings on " + std::to_string(negative_files) +
             " negatives" + (missed.empty() ? "" : ", missed: " + missed));
}

// ---- criterion 6: idempotence & locality --------------------------------------

void criterion_6() {
  bool ok = true;
  std::string detail;
  for (const auto &file : corpus_files("positives")) {
    std::string want = expected_pattern_for(file.filename().string());
    std::string source = slurp(file);
    FileAnalysis before = analyze_source(file.string(), source, bundles);
    // byte range covered by the findings (whole lines)
    uint32_t low = UINT32_MAX, high = 0;
    for (const auto &located : before.findings)
      for (const Span &span : located.finding.spans) {
        low = std::min(low, span.begin);
        high = std::max(high, span.end);
      }
    FixOutcome outcome = fix_source(file.string(), source, bundles);
    if (outcome.applied == 0) {
      ok = false;
      detail = file.filename().string() + ": no fix applied";
      break;
    }
    // idempotence: pattern gone at that site
    FileAnalysis after = analyze_source(file.string(), outcome.source, bundles);
    for (const auto &located : after.findings)
      if (located.finding.pattern_id == want) {
        ok = false;
        detail = file.filename().string() + ": pattern still present";
      }
    // locality: bytes outside the touched lines unchanged
    auto line_start = [](const std::string &text, uint32_t offset) {
      size_t pos = offset;
      while (pos > 0 && text[pos - 1] != '\n')
        --pos;
      return pos;
    };
    auto line_end = [](const std::string &text, uint32_t offset) {
      size_t pos = offset;
      while (pos < text.size() && text[pos] != '\n')
        ++pos;
      return pos < text.size() ? pos + 1 : pos;
    };
    std::string prefix = source.substr(0, line_start(source, low));
    std::string suffix = source.substr(line_end(source, high));
    if (outcome.source.substr(0, prefix.size()) != prefix ||
        (suffix.size() > 0 &&
         (outcome.source.size() < suffix.size() ||
          outcome.source.substr(outcome.source.size() - suffix.size()) !=
              suffix))) {
      ok = false;
      detail = file.filename().string() + ": bytes outside the fix changed";
    }
    // the committed expected output pins the exact bytes
    fs::path golden =
        fs::path(PDGFIX_CORPUS_DIR) / "expected" / file.filename();
    if (fs::exists(golden) && slurp(golden) != outcome.source) {
      ok = false;
      detail = file.filename().string() + ": differs from the golden output";
    }
    if (!ok)
      break;
  }
  report(6, ok, "fix idempotence and byte-level locality", detail);
}

// ---- criterion 7: self-match ---------------------------------------------------

void criterion_7() {
  bool ok = true;
  std::string detail;
  for (const PatternBundle &bundle : bundles) {
    SyntaxTree tree = *bundle.canonical_tree;
    std::vector<FunctionUnit> units = function_units(tree);
    if (units.empty()) {
      ok = false;
      detail = bundle.id + ": no unit";
      continue;
    }
    Pdg canonical = build_fgpdg(tree, units.front().node);
    MatchResult result = find_matches(bundle, canonical);
    size_t non_anchor = 0;
    for (const PdgNode &v : bundle.graph.vertices)
      if (!v.anchor)
        ++non_anchor;
    bool covered = false;
    for (const Isomorphism &iso : result.matches)
      if (iso.vertex_map.size() == non_anchor)
        covered = true;
    if (!covered) {
      ok = false;
      detail = bundle.id + ": no covering isomorphism";
    }
  }
  report(7, ok, "every compiled bundle matches its canonical instance",
         detail);
}

// ---- criterion 8: performance sanity --------------------------------------------

void criterion_8() {
  // Build a synthetic 10 kLOC corpus from realistic templates.
  fs::path dir = fs::temp_directory_path() / "pdgfix_perf_corpus";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const char *templates[] = {
      "def handler_%d(request, cache):\n"
      "    key = request.path\n"
      "    if key in cache.keys():\n"
      "        return cache[key]\n"
      "    value = compute(key)\n"
      "    cache[key] = value\n"
      "    return value\n",
      "def reducer_%d(values, start):\n"
      "    total = start\n"
      "    for v in values:\n"
      "        total = total + v * v\n"
      "    if total == None:\n"
      "        return 0\n"
      "    return total\n",
      "def walker_%d(tree, visit):\n"
      "    stack = [tree]\n"
      "    seen = set()\n"
      "    while stack:\n"
      "        node = stack.pop()\n"
      "        if not node in seen:\n"
      "            seen.add(node)\n"
      "            visit(node)\n"
      "            stack.extend(node.children)\n"
      "    return seen\n",
      "def formatter_%d(rows, sep):\n"
      "    parts = []\n"
      "    for r in range(10):\n"
      "        parts.append(str(r))\n"
      "    if len(parts) == 0:\n"
      "        return ''\n"
      "    return sep.join(parts)\n",
      "def window_%d(data, size):\n"
      "    data = [0] * size\n"
      "    out = []\n"
      "    for i in range(len(data)):\n"
      "        out.append(data[i])\n"
      "    return out\n",
  };
  int total_lines = 0;
  int file_index = 0;
  std::ostringstream current;
  int lines_in_file = 0;
  auto flush_file = [&]() {
    if (lines_in_file == 0)
      return;
    std::ofstream out(dir / ("gen_" + std::to_string(file_index++) + ".py"));
    out << current.str();
    current.str("");
    lines_in_file = 0;
  };
  int counter = 0;
  while (total_lines < 10000) {
    char buffer[1024];
    std::snprintf(buffer, sizeof buffer, templates[counter % 5], counter);
    ++counter;
    std::string text(buffer);
    int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n')) +
                1; // separating blank line
    current << text << "\n";
    lines_in_file += lines;
    total_lines += lines;
    if (lines_in_file > 400)
      flush_file();
  }
  flush_file();

  auto start = Clock::now();
  std::vector<fs::path> files = collect_python_files({dir.string()});
  std::vector<int> counts(files.size(), 0);
  run_parallel_ordered(files.size(), 0, [&](size_t i) {
    FileAnalysis analysis =
        analyze_source(files[i].string(), slurp(files[i]), bundles);
    counts[i] = static_cast<int>(analysis.findings.size());
  });
  double elapsed = seconds_since(start);
  int findings = 0;
  for (int c : counts)
    findings += c;
  report(8, elapsed < 5.0,
         "10 kLOC check with 9 patterns under 5s",
         std::to_string(total_lines) + " lines, " +
             std::to_string(findings) + " findings in " +
             std::to_string(elapsed) + "s");
  fs::remove_all(dir);
}

// ---- criterion 9: transactionality -----------------------------------------------

void criterion_9() {
  int injected = 0, intact = 0;
  for (const auto &file : corpus_files("positives")) {
    std::string source = slurp(file);
    std::string want = expected_pattern_for(file.filename().string());
    const PatternBundle *original = bundle_named(want);
    if (original == nullptr)
      continue;
    PatternBundle broken = *original;
    EditAction bogus;
    bogus.op = EditOp::Delete;
    bogus.target = NodeRef::existing(0); // module root: never deletable
    broken.script.insert(broken.script.begin(), bogus);

    FileAnalysis analysis =
        analyze_source(file.string(), source, {*original});
    for (const auto &located : analysis.findings) {
      ++injected;
      std::string result =
          apply_fix(source, *analysis.tree, located.finding, broken,
                    analysis.unit_graphs[located.unit]);
      if (result == source)
        ++intact;
    }
  }
  report(9, injected > 0 && intact == injected,
         "fault-injected scripts leave inputs byte-identical",
         std::to_string(intact) + "/" + std::to_string(injected));
}

} // namespace

int main() {
  bundles = load_pattern_set(PDGFIX_PATTERN_DIR, /*strict=*/true);
  if (bundles.size() != 9) {
    std::printf("FATAL: expected 9 built-in bundles, found %zu\n",
                bundles.size());
    return 1;
  }
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (failures == 0) {
    std::printf("all 9 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criterion(s) failed\n", failures);
  return 1;
}
