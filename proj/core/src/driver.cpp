#include "pdgfix/driver.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pdgfix/errors.hpp"
#include "pdgfix/treediff.hpp"

namespace pdgfix {

FileAnalysis analyze_source(const std::string &path, std::string source,
                            const std::vector<PatternBundle> &bundles) {
  FileAnalysis analysis;
  analysis.path = path;
  analysis.source = std::move(source);
  try {
    analysis.tree =
        std::make_shared<SyntaxTree>(parse_source(analysis.source));
  } catch (const ParseError &e) {
    analysis.parse_error = e.what();
    return analysis;
  }

  std::vector<FunctionUnit> units = function_units(*analysis.tree);
  for (const FunctionUnit &unit : units)
    analysis.unit_graphs.push_back(build_fgpdg(*analysis.tree, unit.node));

  // Findings are deduplicated across units on (pattern id, span set):
  // nested functions are analyzed both standalone and as part of their
  // enclosing unit.
  std::set<std::pair<std::string, std::vector<Span>>> seen;
  for (const PatternBundle &bundle : bundles) {
    for (size_t u = 0; u < analysis.unit_graphs.size(); ++u) {
      const Pdg &target = analysis.unit_graphs[u];
      MatchResult result = find_matches(bundle, target);
      if (result.budget_exceeded) {
        analysis.skipped_checks.push_back(
            "pattern '" + bundle.id + "' skipped in " + path +
            " (search budget exceeded)");
        continue;
      }
      for (Isomorphism &iso : result.matches) {
        std::set<int> mapped;
        for (const auto &[p, t] : iso.vertex_map)
          mapped.insert(t);
        Finding finding;
        finding.pattern_id = bundle.id;
        finding.file = path;
        finding.iso = std::move(iso);
        finding.spans = highlight_spans(target, mapped);
        finding.message = bundle.description;
        if (finding.spans.empty())
          continue;
        if (!seen.insert({bundle.id, finding.spans}).second)
          continue;
        try {
          remap_script(bundle, finding, target);
          finding.fixable = true;
        } catch (const RemapFailure &) {
          finding.fixable = false;
        }
        analysis.findings.push_back({std::move(finding), u, &bundle});
      }
    }
  }
  std::sort(analysis.findings.begin(), analysis.findings.end(),
            [](const FileAnalysis::Located &a, const FileAnalysis::Located &b) {
              uint32_t sa = a.finding.spans.front().begin;
              uint32_t sb = b.finding.spans.front().begin;
              if (sa != sb)
                return sa < sb;
              return a.finding.pattern_id < b.finding.pattern_id;
            });
  return analysis;
}

namespace {

bool spans_intersect(const std::vector<Span> &a, const std::vector<Span> &b) {
  for (const Span &x : a)
    for (const Span &y : b)
      if (x.overlaps(y))
        return true;
  return false;
}

} // namespace

FixOutcome fix_source(const std::string &path, std::string source,
                      const std::vector<PatternBundle> &bundles,
                      int max_passes) {
  FixOutcome outcome;
  outcome.source = std::move(source);
  for (int pass = 0; pass < max_passes; ++pass) {
    FileAnalysis analysis = analyze_source(path, outcome.source, bundles);
    for (const std::string &note : analysis.skipped_checks)
      outcome.skipped_checks.push_back(note);
    if (pass == 0)
      outcome.findings_before = static_cast<int>(analysis.findings.size());
    if (!analysis.tree)
      break;

    // Fixable findings, applied in descending start offset so earlier spans
    // stay valid; overlapping candidates wait for the next pass.
    std::vector<const FileAnalysis::Located *> fixable;
    for (const auto &located : analysis.findings)
      if (located.finding.fixable)
        fixable.push_back(&located);
    if (fixable.empty()) {
      outcome.remaining = std::move(analysis.findings);
      return outcome;
    }
    std::sort(fixable.begin(), fixable.end(),
              [](const FileAnalysis::Located *a,
                 const FileAnalysis::Located *b) {
                uint32_t sa = a->finding.spans.front().begin;
                uint32_t sb = b->finding.spans.front().begin;
                if (sa != sb)
                  return sa > sb;
                return a->finding.pattern_id < b->finding.pattern_id;
              });

    SyntaxTree current = *analysis.tree;
    std::set<NodeId> touched;
    std::vector<Span> applied_spans;
    int applied_this_pass = 0;
    for (const FileAnalysis::Located *located : fixable) {
      if (spans_intersect(located->finding.spans, applied_spans))
        continue;
      try {
        std::vector<EditAction> script =
            remap_script(*located->bundle, located->finding,
                         analysis.unit_graphs[located->unit]);
        ApplyResult applied = apply_edit_script(current, script);
        current = std::move(applied.tree);
        touched.insert(applied.touched.begin(), applied.touched.end());
        for (const Span &span : located->finding.spans)
          applied_spans.push_back(span);
        ++applied_this_pass;
      } catch (const std::exception &) {
        continue; // failed fix leaves the file unchanged for this finding
      }
    }
    if (applied_this_pass == 0) {
      outcome.remaining = std::move(analysis.findings);
      return outcome;
    }
    std::string rendered;
    try {
      rendered = render(current, analysis.source, touched);
      parse_source(rendered);
    } catch (const std::exception &) {
      outcome.remaining = std::move(analysis.findings);
      return outcome; // keep the last good text
    }
    outcome.source = std::move(rendered);
    outcome.applied += applied_this_pass;
  }
  FileAnalysis final_state = analyze_source(path, outcome.source, bundles);
  outcome.remaining = std::move(final_state.findings);
  return outcome;
}

std::vector<std::filesystem::path>
collect_python_files(const std::vector<std::string> &paths) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const std::string &raw : paths) {
    fs::path path(raw);
    if (fs::is_regular_file(path)) {
      files.push_back(path);
    } else if (fs::is_directory(path)) {
      for (const auto &entry : fs::recursive_directory_iterator(path))
        if (entry.is_regular_file() && entry.path().extension() == ".py")
          files.push_back(entry.path());
    } else {
      throw IoError("path does not exist: " + raw);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

void run_parallel_ordered(size_t count, int jobs,
                          const std::function<void(size_t)> &work) {
  unsigned int n = jobs > 0 ? static_cast<unsigned int>(jobs)
                            : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned int>(n, count == 0 ? 1 : static_cast<unsigned int>(count));
  if (n <= 1) {
    for (size_t i = 0; i < count; ++i)
      work(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned int t = 0; t < n; ++t)
    workers.emplace_back([&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= count)
          return;
        work(i);
      }
    });
  for (std::thread &worker : workers)
    worker.join();
}

SpanDisplay display_span(const LineIndex &lines, const Span &span) {
  LineCol start = lines.locate(span.begin);
  LineCol end = lines.locate(span.end);
  return {start.line, start.col, end.line, end.col};
}

std::string finding_to_json_line(const Finding &finding,
                                 const LineIndex &lines) {
  nlohmann::json j;
  j["pattern"] = finding.pattern_id;
  j["file"] = finding.file;
  nlohmann::json spans = nlohmann::json::array();
  for (const Span &span : finding.spans) {
    SpanDisplay d = display_span(lines, span);
    spans.push_back({{"start_line", d.start_line},
                     {"start_col", d.start_col},
                     {"end_line", d.end_line},
                     {"end_col", d.end_col}});
  }
  j["spans"] = std::move(spans);
  j["message"] = finding.message;
  j["fixable"] = finding.fixable;
  return j.dump();
}

namespace {

std::vector<std::string> split_lines(const std::string &text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    current += c;
    if (c == '\n') {
      lines.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty())
    lines.push_back(current);
  return lines;
}

} // namespace

std::string unified_diff(const std::string &before, const std::string &after,
                         const std::string &path) {
  std::vector<std::string> a = split_lines(before);
  std::vector<std::string> b = split_lines(after);
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                              : std::max(dp[i + 1][j], dp[i][j + 1]);

  struct Row {
    char tag; // ' ', '-', '+'
    size_t ai, bi;
    const std::string *text;
  };
  std::vector<Row> rows;
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
      rows.push_back({' ', i, j, &a[i]});
      ++i;
      ++j;
    } else if (i < n && (j >= m || dp[i + 1][j] >= dp[i][j + 1])) {
      rows.push_back({'-', i, j, &a[i]});
      ++i;
    } else {
      rows.push_back({'+', i, j, &b[j]});
      ++j;
    }
  }

  std::ostringstream out;
  out << "--- " << path << "\n+++ " << path << " (fixed)\n";
  const size_t context = 3;
  size_t r = 0;
  while (r < rows.size()) {
    if (rows[r].tag == ' ') {
      ++r;
      continue;
    }
    size_t start = r >= context ? r - context : 0;
    size_t end = r;
    size_t quiet = 0;
    while (end < rows.size() && quiet <= context * 2) {
      if (rows[end].tag == ' ')
        ++quiet;
      else
        quiet = 0;
      ++end;
    }
    if (quiet > context)
      end -= quiet - context;
    size_t a_start = rows[start].ai + 1, b_start = rows[start].bi + 1;
    size_t a_count = 0, b_count = 0;
    for (size_t k = start; k < end; ++k) {
      if (rows[k].tag != '+')
        ++a_count;
      if (rows[k].tag != '-')
        ++b_count;
    }
    out << "@@ -" << a_start << "," << a_count << " +" << b_start << ","
        << b_count << " @@\n";
    for (size_t k = start; k < end; ++k) {
      std::string line = *rows[k].text;
      if (!line.empty() && line.back() == '\n')
        line.pop_back();
      out << rows[k].tag << line << "\n";
    }
    r = end;
  }
  return out.str();
}

} // namespace pdgfix
