#pragma once

#include <stdexcept>
#include <string>

namespace pdgfix {

/// Syntax error in a Python source file. Callers analyzing many files catch
/// this per file and keep going.
struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line, int column, const std::string &msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + msg),
        line(line), column(column) {}
};

/// An edited tree contains a node the pretty-printer has no rule for.
struct RenderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An edit action referenced a node that no longer resolves. Application is
/// transactional, so the input tree is left untouched.
struct DanglingReference : std::runtime_error {
  int action_index;
  DanglingReference(int action_index, const std::string &msg)
      : std::runtime_error("action " + std::to_string(action_index) + ": " +
                           msg),
        action_index(action_index) {}
};

struct UnknownVertex : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No full kind/edge-preserving mapping of the canonical graph into an
/// instance graph exists.
struct AlignmentFailure : std::runtime_error {
  int instance_index;
  AlignmentFailure(int instance_index, const std::string &msg)
      : std::runtime_error(msg), instance_index(instance_index) {}
};

/// The generalized LCS of the instance edit scripts came out empty.
struct EmptyCore : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BundleInvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A script reference could not be rewritten onto the match target; the
/// finding is reported without a fix.
struct RemapFailure : std::runtime_error {
  int action_index;
  RemapFailure(int action_index, const std::string &msg)
      : std::runtime_error("action " + std::to_string(action_index) + ": " +
                           msg),
        action_index(action_index) {}
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateId : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace pdgfix
