#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"

namespace plumeloc::detail {

// Shortest round-trip representation; parsing it back yields the same bits.
inline std::string format_double(double v) { return fmt::format("{}", v); }

inline double parse_double(std::string_view token, const std::filesystem::path& path,
                           std::size_t line_no) {
  // std::from_chars rejects leading '+' and "inf"; accept both.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(fmt::format("{}:{}: cannot parse number '{}'",
                                      path.string(), line_no, token));
  }
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace plumeloc::detail
