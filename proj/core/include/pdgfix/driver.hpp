#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdgfix/applier.hpp"
#include "pdgfix/bundleio.hpp"
#include "pdgfix/matcher.hpp"

namespace pdgfix {

/// Analysis state for one source buffer: the parse, one graph per function
/// unit, and the findings located in them.
struct FileAnalysis {
  std::string path;
  std::string source;
  std::shared_ptr<SyntaxTree> tree; // null on parse failure
  std::string parse_error;          // message when tree is null
  std::vector<Pdg> unit_graphs;
  struct Located {
    Finding finding;
    size_t unit = 0;            // index into unit_graphs
    const PatternBundle *bundle = nullptr;
  };
  std::vector<Located> findings;
  std::vector<std::string> skipped_checks; // matcher budget exhaustion notes
};

/// Parses, builds per-unit graphs, and matches every bundle. Findings are
/// deduplicated on (pattern id, span set) and sorted by offset then pattern
/// id. Parse failures are reported in the result, never thrown.
FileAnalysis analyze_source(const std::string &path, std::string source,
                            const std::vector<PatternBundle> &bundles);

struct FixOutcome {
  std::string source;     // final text after the fixpoint loop
  int applied = 0;        // fixes performed
  int findings_before = 0;
  std::vector<FileAnalysis::Located> remaining;
  std::vector<std::string> skipped_checks;
};

/// Applies fixable findings to fixpoint: per pass, non-overlapping fixes are
/// applied in descending start-offset order, then the file is re-analyzed
/// (at most `max_passes` passes).
FixOutcome fix_source(const std::string &path, std::string source,
                      const std::vector<PatternBundle> &bundles,
                      int max_passes = 10);

/// Recursively collects .py files from the given paths, sorted. Throws
/// IoError for a path that does not exist.
std::vector<std::filesystem::path>
collect_python_files(const std::vector<std::string> &paths);

/// Runs `work` over the files with a small worker pool; results keep file
/// order. `jobs` <= 0 picks the hardware concurrency.
void run_parallel_ordered(size_t count, int jobs,
                          const std::function<void(size_t)> &work);

/// Line/column span records for diagnostics (1-based, end-exclusive column).
struct SpanDisplay {
  int start_line;
  int start_col;
  int end_line;
  int end_col;
};
SpanDisplay display_span(const LineIndex &lines, const Span &span);

/// One finding as a JSON line: {"pattern", "file", "spans", "message",
/// "fixable"}.
std::string finding_to_json_line(const Finding &finding,
                                 const LineIndex &lines);

/// Unified diff (minimal line-based) used by fix --dry-run and the
/// interactive prompt.
std::string unified_diff(const std::string &before, const std::string &after,
                         const std::string &path);

} // namespace pdgfix
