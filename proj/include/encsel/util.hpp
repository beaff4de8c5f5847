#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "encsel/errors.hpp"

namespace encsel {

// Shortest round-trip fixed-point representation, padded to at least
// `min_fraction` fractional digits.
inline std::string format_decimal(double value, int min_fraction = 6) {
  if (!std::isfinite(value)) throw DataError("cannot serialize a non-finite value");
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  if (ec != std::errc{}) throw DataError("number formatting failed");
  std::string s(buf, end);
  auto dot = s.find('.');
  int fraction = 0;
  if (dot == std::string::npos) {
    s.push_back('.');
  } else {
    fraction = static_cast<int>(s.size() - dot - 1);
  }
  if (fraction < min_fraction) s.append(static_cast<std::size_t>(min_fraction - fraction), '0');
  return s;
}

// Strict decimal parse; rejects trailing garbage, NaN and infinities.
inline bool parse_finite(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    fields.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string trim_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

// FNV-1a, used to derive stable per-job seeds from string keys.
inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Identifiers that appear in CSV cells and file names.
inline void validate_identifier(std::string_view id) {
  if (id.empty()) throw DataError("empty instance id");
  for (char c : id) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') {
      throw DataError("instance id '" + std::string(id) + "' contains a reserved character");
    }
  }
}

}  // namespace encsel
