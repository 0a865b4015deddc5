#ifndef MCD_SRC_TEXT_IO_H_
#define MCD_SRC_TEXT_IO_H_

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "mcd/error.h"

namespace mcd::internal {

// Splits on ASCII whitespace. Returns false for blank and '#' comment lines.
inline bool split_fields(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return !fields.empty() && fields.front().front() != '#';
}

inline std::uint64_t parse_unsigned(std::string_view s, std::size_t line, const char* what) {
  std::uint64_t value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, std::string("expected non-negative integer ") + what + ", got '" +
                               std::string(s) + "'");
  }
  return value;
}

inline std::int64_t parse_signed(std::string_view s, std::size_t line, const char* what) {
  std::int64_t value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" + std::string(s) +
                               "'");
  }
  return value;
}

inline double parse_real(std::string_view s, std::size_t line, const char* what) {
  // from_chars for double is missing on some toolchains; strtod on a copy.
  std::string copy(s);
  char* end = nullptr;
  double value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw ParseError(line, std::string("expected number ") + what + ", got '" + copy + "'");
  }
  return value;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace mcd::internal

#endif  // MCD_SRC_TEXT_IO_H_
