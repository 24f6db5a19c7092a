#include <benchmark/benchmark.h>

#include <sstream>
#include <string>

#include "pdgfix/bundleio.hpp"
#include "pdgfix/driver.hpp"
#include "pdgfix/fgpdg.hpp"
#include "pdgfix/treediff.hpp"

using namespace pdgfix;

namespace {

// Synthetic module: `n` copies of a mixed-construct function.
std::string make_source(int functions) {
  std::ostringstream out;
  for (int i = 0; i < functions; ++i) {
    out << "def handler_" << i << "(request, cache, rows):\n"
        << "    key = request.path\n"
        << "    if key in cache.keys():\n"
        << "        return cache[key]\n"
        << "    total = 0\n"
        << "    for r in rows:\n"
        << "        total += r * r\n"
        << "    data = [1, 2, 3]\n"
        << "    for i in range(len(data)):\n"
        << "        print(data[i])\n"
        << "    cache[key] = total\n"
        << "    return total\n\n";
  }
  return out.str();
}

const std::vector<PatternBundle> &bundles() {
  static std::vector<PatternBundle> set =
      load_pattern_set(PDGFIX_PATTERN_DIR, /*strict=*/true);
  return set;
}

} // namespace

static void BM_Parse(benchmark::State &state) {
  std::string source = make_source(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    SyntaxTree tree = parse_source(source);
    benchmark::DoNotOptimize(tree.nodes.data());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(source.size()));
}
BENCHMARK(BM_Parse)->Arg(1)->Arg(16)->Arg(128);

static void BM_BuildGraphs(benchmark::State &state) {
  std::string source = make_source(static_cast<int>(state.range(0)));
  SyntaxTree tree = parse_source(source);
  std::vector<FunctionUnit> units = function_units(tree);
  for (auto _ : state) {
    for (const FunctionUnit &unit : units) {
      Pdg pdg = build_fgpdg(tree, unit.node);
      benchmark::DoNotOptimize(pdg.vertices.data());
    }
  }
}
BENCHMARK(BM_BuildGraphs)->Arg(1)->Arg(16)->Arg(128);

static void BM_MatchAllPatterns(benchmark::State &state) {
  std::string source = make_source(static_cast<int>(state.range(0)));
  SyntaxTree tree = parse_source(source);
  std::vector<Pdg> graphs;
  for (const FunctionUnit &unit : function_units(tree))
    graphs.push_back(build_fgpdg(tree, unit.node));
  for (auto _ : state) {
    size_t findings = 0;
    for (const Pdg &graph : graphs)
      for (const PatternBundle &bundle : bundles())
        findings += find_matches(bundle, graph).matches.size();
    benchmark::DoNotOptimize(findings);
  }
}
BENCHMARK(BM_MatchAllPatterns)->Arg(1)->Arg(16);

static void BM_CheckEndToEnd(benchmark::State &state) {
  std::string source = make_source(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    FileAnalysis analysis = analyze_source("bench.py", source, bundles());
    benchmark::DoNotOptimize(analysis.findings.data());
  }
}
BENCHMARK(BM_CheckEndToEnd)->Arg(1)->Arg(16);

static void BM_DiffAndApply(benchmark::State &state) {
  std::string before_src = make_source(4);
  std::string after_src = before_src;
  // a realistic small edit: rename one handler's accumulator
  size_t pos = after_src.find("total");
  while (pos != std::string::npos) {
    after_src.replace(pos, 5, "accum");
    pos = after_src.find("total", pos);
  }
  SyntaxTree before = parse_source(before_src);
  SyntaxTree after = parse_source(after_src);
  for (auto _ : state) {
    NodeMapping mapping = match_trees(before, after);
    std::vector<EditAction> script =
        compute_edit_script(before, after, mapping);
    ApplyResult applied = apply_edit_script(before, script);
    benchmark::DoNotOptimize(applied.tree.nodes.data());
  }
}
BENCHMARK(BM_DiffAndApply);

BENCHMARK_MAIN();
