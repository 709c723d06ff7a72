#pragma once

// CSV output: header row, LF endings, '.' decimals, 9 significant digits.

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quicksearch {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class CsvCell {
 public:
  CsvCell(double v) : text_(format_real(v)) {}
  CsvCell(std::int64_t v) : text_(std::to_string(v)) {}
  CsvCell(int v) : text_(std::to_string(v)) {}
  CsvCell(std::uint64_t v) : text_(std::to_string(v)) {}
  CsvCell(bool v) : text_(v ? "1" : "0") {}
  CsvCell(const char* v) : text_(v) {}
  CsvCell(std::string v) : text_(std::move(v)) {}

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Accumulates the whole table so it can be digested before it is written.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    append_line(header);
  }

  void row(std::initializer_list<CsvCell> cells) {
    std::vector<std::string> texts;
    texts.reserve(cells.size());
    for (const auto& c : cells) texts.push_back(c.text());
    append_line(texts);
  }

  const std::string& str() const { return body_; }
  std::size_t rows() const { return rows_; }
  std::uint64_t digest() const { return fnv1a(body_); }

 private:
  void append_line(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CSV row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
    ++rows_;
  }

  std::size_t columns_;
  std::string body_;
  std::size_t rows_ = 0;
};

}  // namespace quicksearch
