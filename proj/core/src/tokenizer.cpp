#include "tokenizer.hpp"

#include <array>
#include <cctype>

#include "pdgfix/errors.hpp"

namespace pdgfix {

namespace {

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool is_ident_cont(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}
bool is_digit(unsigned char c) { return std::isdigit(c); }

// Longest-match operator table.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=",
    "+=",  "-=",  "*=",  "/=",  "%=",  "@=", "&=", "|=", "^=", "**", "//",
    ">>",  "<<",  "+",   "-",   "*",   "/",  "%",  "@",  "&",  "|",  "^",
    "~",   "<",   ">",   "(",   ")",   "[",  "]",  "{",  "}",  ",",  ":",
    ".",   ";",   "="};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { indents_.push_back(0); }

  std::vector<Token> run() {
    at_line_start_ = true;
    while (pos_ <= src_.size()) {
      if (at_line_start_ && bracket_depth_ == 0) {
        if (!handle_indentation())
          break; // reached end of input
        at_line_start_ = false;
        continue;
      }
      if (pos_ >= src_.size())
        break;
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() &&
          (src_[pos_ + 1] == '\n' ||
           (src_[pos_ + 1] == '\r' && pos_ + 2 < src_.size() &&
            src_[pos_ + 2] == '\n'))) {
        pos_ += src_[pos_ + 1] == '\n' ? 2 : 3;
        continue;
      }
      if (c == '\r' || c == '\n') {
        size_t nl_start = pos_;
        pos_ += (c == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n')
                    ? 2
                    : 1;
        if (bracket_depth_ == 0) {
          if (line_has_tokens_) {
            emit(TokKind::Newline, {static_cast<uint32_t>(nl_start),
                                    static_cast<uint32_t>(pos_)});
            line_has_tokens_ = false;
          }
          at_line_start_ = true;
        }
        continue;
      }
      if (is_ident_start(c)) {
        lex_name_or_string_prefix();
        continue;
      }
      if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                          is_digit(src_[pos_ + 1]))) {
        lex_number();
        continue;
      }
      if (c == '\'' || c == '"') {
        lex_string(pos_);
        continue;
      }
      lex_operator();
    }
    // Close the final logical line and outstanding indents.
    if (line_has_tokens_)
      emit(TokKind::Newline, end_span());
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokKind::Dedent, end_span());
    }
    emit(TokKind::End, end_span());
    return std::move(tokens_);
  }

private:
  Span end_span() const {
    return {static_cast<uint32_t>(src_.size()),
            static_cast<uint32_t>(src_.size())};
  }

  [[noreturn]] void fail(size_t offset, const std::string &msg) {
    LineIndex idx{src_};
    LineCol lc = idx.locate(static_cast<uint32_t>(offset));
    throw ParseError(lc.line, lc.col, msg);
  }

  void emit(TokKind kind, Span span) {
    LineCol lc = locate(span.begin);
    tokens_.push_back(
        {kind, src_.substr(span.begin, span.size()), span, lc.line, lc.col});
    if (kind == TokKind::Name || kind == TokKind::Number ||
        kind == TokKind::String || kind == TokKind::Op)
      line_has_tokens_ = true;
  }

  LineCol locate(size_t offset) {
    // Tokens are emitted in order; track line starts incrementally.
    while (scan_pos_ < offset && scan_pos_ < src_.size()) {
      if (src_[scan_pos_] == '\n') {
        ++scan_line_;
        scan_line_start_ = scan_pos_ + 1;
      }
      ++scan_pos_;
    }
    return {scan_line_, static_cast<int>(offset - scan_line_start_) + 1};
  }

  // Measures leading whitespace of the current line and emits INDENT/DEDENT.
  // Returns false when end of input is reached.
  bool handle_indentation() {
    while (true) {
      size_t line_begin = pos_;
      int width = 0;
      while (pos_ < src_.size()) {
        char c = src_[pos_];
        if (c == ' ')
          width += 1;
        else if (c == '\t')
          width += 8 - width % 8;
        else if (c == '\f')
          width = 0;
        else
          break;
        ++pos_;
      }
      if (pos_ >= src_.size())
        return false;
      char c = src_[pos_];
      if (c == '\r' || c == '\n') { // blank line
        pos_ += (c == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n')
                    ? 2
                    : 1;
        continue;
      }
      if (c == '#') { // comment-only line
        skip_comment();
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        pos_ += 2;
        continue;
      }
      if (width > indents_.back()) {
        indents_.push_back(width);
        emit(TokKind::Indent, {static_cast<uint32_t>(line_begin),
                               static_cast<uint32_t>(pos_)});
      } else if (width < indents_.back()) {
        while (indents_.size() > 1 && indents_.back() > width) {
          indents_.pop_back();
          emit(TokKind::Dedent, {static_cast<uint32_t>(pos_),
                                 static_cast<uint32_t>(pos_)});
        }
        if (indents_.back() != width)
          fail(pos_, "unindent does not match any outer indentation level");
      }
      return true;
    }
  }

  void skip_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n')
      ++pos_;
  }

  void lex_name_or_string_prefix() {
    size_t start = pos_;
    while (pos_ < src_.size() && is_ident_cont(src_[pos_]))
      ++pos_;
    std::string_view word = src_.substr(start, pos_ - start);
    // String prefix directly followed by a quote?
    if (word.size() <= 2 && pos_ < src_.size() &&
        (src_[pos_] == '\'' || src_[pos_] == '"')) {
      bool prefix_ok = true;
      for (char c : word) {
        char l = static_cast<char>(std::tolower(c));
        if (l != 'r' && l != 'b' && l != 'u' && l != 'f')
          prefix_ok = false;
      }
      if (prefix_ok) {
        pos_ = start;
        lex_string(start, word.size());
        return;
      }
    }
    emit(TokKind::Name, {static_cast<uint32_t>(start),
                         static_cast<uint32_t>(pos_)});
  }

  void lex_number() {
    size_t start = pos_;
    auto take_digits = [&](auto pred) {
      while (pos_ < src_.size() &&
             (pred(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
    };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X' ||
         src_[pos_ + 1] == 'o' || src_[pos_ + 1] == 'O' ||
         src_[pos_ + 1] == 'b' || src_[pos_ + 1] == 'B')) {
      pos_ += 2;
      take_digits([](unsigned char c) { return std::isalnum(c); });
    } else {
      take_digits(is_digit);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        take_digits(is_digit);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t mark = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
          ++pos_;
        if (pos_ < src_.size() && is_digit(src_[pos_]))
          take_digits(is_digit);
        else
          pos_ = mark; // not an exponent (e.g. attribute "1 .e")
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J'))
        ++pos_;
    }
    emit(TokKind::Number,
         {static_cast<uint32_t>(start), static_cast<uint32_t>(pos_)});
  }

  // Lexes a (possibly prefixed, possibly triple-quoted) string literal
  // starting at `start`; `prefix_len` bytes of prefix letters precede the
  // opening quote.
  void lex_string(size_t start, size_t prefix_len = 0) {
    pos_ = start + prefix_len;
    char quote = src_[pos_];
    bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote &&
                  src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (!triple && (c == '\n' || c == '\r'))
        fail(start, "unterminated string literal");
      if (c == quote) {
        if (!triple) {
          ++pos_;
          emit(TokKind::String,
               {static_cast<uint32_t>(start), static_cast<uint32_t>(pos_)});
          return;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote &&
            src_[pos_ + 2] == quote) {
          pos_ += 3;
          emit(TokKind::String,
               {static_cast<uint32_t>(start), static_cast<uint32_t>(pos_)});
          return;
        }
        ++pos_;
        continue;
      }
      ++pos_;
    }
    fail(start, "unterminated string literal");
  }

  void lex_operator() {
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_).starts_with(op)) {
        Span span{static_cast<uint32_t>(pos_),
                  static_cast<uint32_t>(pos_ + op.size())};
        pos_ += op.size();
        if (op == "(" || op == "[" || op == "{")
          ++bracket_depth_;
        else if (op == ")" || op == "]" || op == "}")
          bracket_depth_ = bracket_depth_ > 0 ? bracket_depth_ - 1 : 0;
        emit(TokKind::Op, span);
        return;
      }
    }
    fail(pos_, "invalid character");
  }

  std::string_view src_;
  size_t pos_ = 0;
  std::vector<Token> tokens_;
  std::vector<int> indents_;
  int bracket_depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  // incremental line tracking for token positions
  size_t scan_pos_ = 0;
  size_t scan_line_start_ = 0;
  int scan_line_ = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view source) {
  return Lexer(source).run();
}

} // namespace pdgfix
