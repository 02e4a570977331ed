#include "plumeloc/dataset.hpp"

#include <string>

#include <fmt/format.h>

#include "csv.hpp"
#include "plumeloc/errors.hpp"

namespace plumeloc {

namespace {
constexpr std::string_view kHeader = "x_mm,y_mm,z_mm,concentration";
}

SensorArray load_dataset(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(fmt::format("{}: empty dataset file", path.string()));
  }
  if (line != kHeader) {
    throw ValidationError(fmt::format("{}:1: expected header '{}', got '{}'",
                                      path.string(), kHeader, line));
  }
  SensorArray array;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 4) {
      throw ValidationError(fmt::format("{}:{}: expected 4 columns, got {}",
                                        path.string(), line_no, fields.size()));
    }
    SensorLocation loc;
    loc.x = detail::parse_double(fields[0], path, line_no);
    loc.y = detail::parse_double(fields[1], path, line_no);
    loc.z = detail::parse_double(fields[2], path, line_no);
    const double conc = detail::parse_double(fields[3], path, line_no);
    array.sensors.push_back(loc);
    array.observed.push_back(conc);
  }
  if (array.sensors.empty()) {
    throw ValidationError(fmt::format("{}: dataset has no sensor rows", path.string()));
  }
  try {
    array.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return array;
}

void write_dataset(const std::filesystem::path& path, const SensorArray& array) {
  array.validate();
  if (!array.has_observed()) {
    throw ValidationError("write_dataset: array carries no observations");
  }
  auto out = detail::open_output(path);
  out << kHeader << '\n';
  for (std::size_t s = 0; s < array.size(); ++s) {
    out << detail::format_double(array.sensors[s].x) << ','
        << detail::format_double(array.sensors[s].y) << ','
        << detail::format_double(array.sensors[s].z) << ','
        << detail::format_double(array.observed[s]) << '\n';
  }
}

}  // namespace plumeloc
