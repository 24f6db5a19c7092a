#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pdgfix {

/// Half-open byte range into a source buffer.
struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;

  uint32_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool contains(const Span &other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool overlaps(const Span &other) const {
    return begin < other.end && other.begin < end;
  }
  friend bool operator==(const Span &a, const Span &b) {
    return a.begin == b.begin && a.end == b.end;
  }
  friend bool operator<(const Span &a, const Span &b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  }
};

/// 1-based line/column pair for display.
struct LineCol {
  int line = 1;
  int col = 1;
};

/// Byte offset to line/column translation for one source buffer.
class LineIndex {
public:
  LineIndex() = default;
  explicit LineIndex(std::string_view source) {
    line_starts_.push_back(0);
    for (uint32_t i = 0; i < source.size(); ++i) {
      if (source[i] == '\n')
        line_starts_.push_back(i + 1);
    }
  }

  LineCol locate(uint32_t offset) const {
    // Last line start <= offset.
    size_t lo = 0, hi = line_starts_.size();
    while (lo + 1 < hi) {
      size_t mid = (lo + hi) / 2;
      if (line_starts_[mid] <= offset)
        lo = mid;
      else
        hi = mid;
    }
    return {static_cast<int>(lo) + 1,
            static_cast<int>(offset - line_starts_[lo]) + 1};
  }

  int line_of(uint32_t offset) const { return locate(offset).line; }
  size_t line_count() const { return line_starts_.size(); }

private:
  std::vector<uint32_t> line_starts_;
};

/// Merge overlapping or abutting spans; result sorted by start offset.
std::vector<Span> merge_spans(std::vector<Span> spans);

} // namespace pdgfix
