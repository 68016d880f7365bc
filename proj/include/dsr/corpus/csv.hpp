#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsr/common.hpp"

namespace dsr::csv {

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_double(std::string_view field, double& out) {
  std::string t = trim(field);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

inline double require_double(const std::string& field, const std::string& path, std::size_t row, std::size_t col) {
  double v;
  if (!parse_double(field, v))
    throw ParseError(path + ":" + std::to_string(row) + ": column " + std::to_string(col + 1) +
                     " is not numeric: '" + trim(field) + "'");
  return v;
}

inline bool looks_numeric(std::string_view field) {
  double v;
  return parse_double(field, v);
}

/// Reads all non-empty lines of a text file. Throws when the file is
/// missing or empty.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw ParseError(path + ": empty file");
  return lines;
}

}  // namespace dsr::csv
