#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "pdgfix/driver.hpp"
#include "pdgfix/errors.hpp"
#include "pdgfix/patterncompile.hpp"

namespace fs = std::filesystem;
using namespace pdgfix;

namespace {

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << content;
  if (!out)
    throw IoError("failed writing " + path.string());
}

// ---- compile ---------------------------------------------------------------

int run_compile(const std::string &examples_dir, const std::string &id,
                std::string message, const std::string &message_file,
                const std::string &out_file,
                const std::string &extra_builtins) {
  try {
    if (!message_file.empty()) {
      message = read_file(message_file);
      while (!message.empty() && (message.back() == '\n' || message.back() == '\r'))
        message.pop_back();
    }
    fs::path dir(examples_dir);
    if (!fs::is_directory(dir))
      throw IoError("examples directory does not exist: " + examples_dir);

    std::vector<fs::path> pair_dirs;
    for (const auto &entry : fs::directory_iterator(dir))
      if (entry.is_directory())
        pair_dirs.push_back(entry.path());
    std::sort(pair_dirs.begin(), pair_dirs.end());

    std::vector<PatternInstance> instances;
    for (const fs::path &pair_dir : pair_dirs) {
      fs::path before = pair_dir / "before.py";
      fs::path after = pair_dir / "after.py";
      if (!fs::exists(before))
        throw IoError("missing " + before.string());
      if (!fs::exists(after))
        throw IoError("missing " + after.string());
      instances.push_back(make_instance(read_file(before), read_file(after)));
    }
    if (instances.empty())
      throw IoError("no <k>/before.py + <k>/after.py pairs under " +
                    examples_dir);

    BuiltinRegistry registry = BuiltinRegistry::standard();
    if (!extra_builtins.empty()) {
      std::vector<std::string> extra;
      std::istringstream in(read_file(extra_builtins));
      std::string line;
      while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
          extra.push_back(line);
      registry = BuiltinRegistry(std::move(extra));
    }

    PatternBundle bundle = compile_pattern(instances, id, message, registry);
    save_bundle(bundle, out_file);
    std::cerr << "compiled pattern '" << id << "' from " << instances.size()
              << " instance(s) -> " << out_file << "\n";
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "compile failed: " << e.what() << "\n";
    return 2;
  }
}

// ---- check / fix ----------------------------------------------------------

std::vector<PatternBundle> load_patterns_or_die(std::string patterns_dir) {
  if (patterns_dir.empty()) {
    const char *env = std::getenv("PDGFIX_PATTERNS");
    if (env != nullptr)
      patterns_dir = env;
  }
  if (patterns_dir.empty())
    throw IoError("no pattern directory (use --patterns or PDGFIX_PATTERNS)");
  std::vector<PatternSetDiagnostic> diagnostics;
  std::vector<PatternBundle> bundles =
      load_pattern_set(patterns_dir, /*strict=*/false, &diagnostics);
  for (const auto &diag : diagnostics)
    std::cerr << "warning: skipping " << diag.file.string() << ": "
              << diag.message << "\n";
  if (bundles.empty())
    std::cerr << "warning: pattern directory " << patterns_dir
              << " holds no usable patterns\n";
  return bundles;
}

void print_human_finding(std::ostream &out, const Finding &finding,
                         const LineIndex &lines) {
  SpanDisplay first = display_span(lines, finding.spans.front());
  out << finding.file << ":" << first.start_line << ":" << first.start_col
      << ": [" << finding.pattern_id << "] " << finding.message
      << (finding.fixable ? " (fixable)" : "") << "\n";
  for (const Span &span : finding.spans) {
    SpanDisplay d = display_span(lines, span);
    out << "    lines " << d.start_line << ":" << d.start_col << "-"
        << d.end_line << ":" << d.end_col << "\n";
  }
}

int run_check(const std::vector<std::string> &paths,
              const std::string &patterns_dir, const std::string &format,
              int jobs) {
  try {
    std::vector<PatternBundle> bundles = load_patterns_or_die(patterns_dir);
    std::vector<fs::path> files = collect_python_files(paths);

    std::vector<FileAnalysis> results(files.size());
    run_parallel_ordered(files.size(), jobs, [&](size_t i) {
      std::string source;
      try {
        source = read_file(files[i]);
      } catch (const std::exception &e) {
        results[i].path = files[i].string();
        results[i].parse_error = e.what();
        return;
      }
      results[i] = analyze_source(files[i].string(), std::move(source), bundles);
    });

    bool any_findings = false;
    for (const FileAnalysis &analysis : results) {
      if (!analysis.parse_error.empty()) {
        std::cerr << analysis.path << ": " << analysis.parse_error << "\n";
        continue;
      }
      for (const std::string &note : analysis.skipped_checks)
        std::cerr << "warning: " << note << "\n";
      LineIndex lines(analysis.source);
      for (const auto &located : analysis.findings) {
        any_findings = true;
        if (format == "json")
          std::cout << finding_to_json_line(located.finding, lines) << "\n";
        else
          print_human_finding(std::cout, located.finding, lines);
      }
    }
    return any_findings ? 1 : 0;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_fix(const std::vector<std::string> &paths,
            const std::string &patterns_dir, bool dry_run, bool interactive,
            int jobs) {
  try {
    std::vector<PatternBundle> bundles = load_patterns_or_die(patterns_dir);
    std::vector<fs::path> files = collect_python_files(paths);

    bool any_findings = false;
    bool any_write_error = false;

    if (interactive) {
      // Interactive mode prompts on the terminal, one finding at a time.
      for (const fs::path &file : files) {
        std::string source = read_file(file);
        bool changed = false;
        for (int round = 0; round < 10; ++round) {
          FileAnalysis analysis =
              analyze_source(file.string(), source, bundles);
          if (!analysis.tree) {
            std::cerr << analysis.path << ": " << analysis.parse_error << "\n";
            break;
          }
          LineIndex lines(analysis.source);
          const FileAnalysis::Located *todo = nullptr;
          static std::set<std::pair<std::string, std::vector<Span>>> declined;
          for (const auto &located : analysis.findings) {
            any_findings = true;
            if (!located.finding.fixable)
              continue;
            if (declined.count(
                    {located.finding.pattern_id, located.finding.spans}))
              continue;
            todo = &located;
            break;
          }
          if (todo == nullptr)
            break;
          print_human_finding(std::cout, todo->finding, lines);
          std::string fixed =
              apply_fix(analysis.source, *analysis.tree, todo->finding,
                        *todo->bundle, analysis.unit_graphs[todo->unit]);
          if (fixed == analysis.source) {
            declined.insert({todo->finding.pattern_id, todo->finding.spans});
            continue;
          }
          std::cout << unified_diff(analysis.source, fixed, file.string());
          std::cout << "apply this fix? [y/n] " << std::flush;
          std::string reply;
          std::getline(std::cin, reply);
          if (!reply.empty() && (reply[0] == 'y' || reply[0] == 'Y')) {
            source = fixed;
            changed = true;
          } else {
            declined.insert({todo->finding.pattern_id, todo->finding.spans});
          }
        }
        if (changed && !dry_run)
          write_file(file, source);
      }
      return any_findings ? 1 : 0;
    }

    std::vector<FixOutcome> outcomes(files.size());
    std::vector<std::string> originals(files.size());
    std::vector<std::string> read_errors(files.size());
    run_parallel_ordered(files.size(), jobs, [&](size_t i) {
      try {
        originals[i] = read_file(files[i]);
        outcomes[i] =
            fix_source(files[i].string(), originals[i], bundles);
      } catch (const std::exception &e) {
        read_errors[i] = e.what();
      }
    });

    for (size_t i = 0; i < files.size(); ++i) {
      if (!read_errors[i].empty()) {
        std::cerr << files[i].string() << ": " << read_errors[i] << "\n";
        continue;
      }
      const FixOutcome &outcome = outcomes[i];
      if (outcome.findings_before > 0)
        any_findings = true;
      for (const std::string &note : outcome.skipped_checks)
        std::cerr << "warning: " << note << "\n";
      if (outcome.source == originals[i]) {
        for (const auto &located : outcome.remaining) {
          LineIndex lines(originals[i]);
          print_human_finding(std::cout, located.finding, lines);
        }
        continue;
      }
      if (dry_run) {
        std::cout << unified_diff(originals[i], outcome.source,
                                  files[i].string());
      } else {
        try {
          write_file(files[i], outcome.source);
          std::cout << files[i].string() << ": applied " << outcome.applied
                    << " fix(es)\n";
        } catch (const std::exception &e) {
          std::cerr << files[i].string() << ": " << e.what() << "\n";
          any_write_error = true;
        }
      }
      LineIndex lines(outcome.source);
      for (const auto &located : outcome.remaining)
        print_human_finding(std::cout, located.finding, lines);
    }
    if (any_write_error)
      return 2;
    return any_findings ? 1 : 0;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"pdgfix: dependence-graph based lint and autofix for Python"};
  app.require_subcommand(1);

  // compile
  auto *compile = app.add_subcommand(
      "compile", "Compile before/after example pairs into a pattern bundle");
  std::string examples_dir, pattern_id, message, message_file, out_file,
      extra_builtins;
  compile->add_option("--examples", examples_dir,
                      "Directory holding <k>/before.py and <k>/after.py")
      ->required();
  compile->add_option("--id", pattern_id, "Pattern identifier")->required();
  compile->add_option("--message", message, "Finding message (the tooltip)");
  compile->add_option("--message-file", message_file,
                      "File holding the finding message");
  compile->add_option("--out", out_file, "Output bundle path")->required();
  compile->add_option("--extra-builtins", extra_builtins,
                      "File with extra exact-match names, one per line");

  // check
  auto *check = app.add_subcommand("check", "Report pattern occurrences");
  std::vector<std::string> check_paths;
  std::string check_patterns, check_format = "human";
  int check_jobs = 0;
  check->add_option("paths", check_paths, "Files or directories")->required();
  check->add_option("--patterns", check_patterns,
                    "Pattern directory (default: $PDGFIX_PATTERNS)");
  check->add_option("--format", check_format, "Output format: human|json")
      ->check(CLI::IsMember({"human", "json"}));
  check->add_option("--jobs", check_jobs, "Worker threads (0 = auto)");

  // fix
  auto *fix = app.add_subcommand("fix", "Apply available fixes");
  std::vector<std::string> fix_paths;
  std::string fix_patterns;
  bool dry_run = false, interactive = false;
  int fix_jobs = 0;
  fix->add_option("paths", fix_paths, "Files or directories")->required();
  fix->add_option("--patterns", fix_patterns,
                  "Pattern directory (default: $PDGFIX_PATTERNS)");
  fix->add_flag("--dry-run", dry_run, "Print diffs, write nothing");
  fix->add_flag("--interactive", interactive, "Confirm each fix on the tty");
  fix->add_option("--jobs", fix_jobs, "Worker threads (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  if (compile->parsed())
    return run_compile(examples_dir, pattern_id, message, message_file,
                       out_file, extra_builtins);
  if (check->parsed())
    return run_check(check_paths, check_patterns, check_format, check_jobs);
  if (fix->parsed())
    return run_fix(fix_paths, fix_patterns, dry_run, interactive, fix_jobs);
  return 2;
}
