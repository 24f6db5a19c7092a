#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pdgfix/span.hpp"

namespace pdgfix {

enum class TokKind : uint8_t {
  Name,
  Number,
  String, // includes prefixed and f-strings, lexed as one token
  Op,
  Newline,
  Indent,
  Dedent,
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string_view text;
  Span span;
  int line = 1;
  int column = 1; // 1-based byte column
};

/// Python-style token stream: logical newlines, INDENT/DEDENT pairs, implicit
/// line joining inside brackets, backslash continuations, comments skipped.
/// Throws ParseError on malformed input (bad indent, unterminated string...).
std::vector<Token> tokenize(std::string_view source);

} // namespace pdgfix
