#pragma once

#include <filesystem>

#include "plumeloc/dispersion.hpp"

namespace plumeloc {

/// Dataset CSV format, one sensor per row:
///   x_mm,y_mm,z_mm,concentration
/// Header required; concentrations must be finite and non-negative.
SensorArray load_dataset(const std::filesystem::path& path);

/// Writes the array (which must carry observations) in the same format.
void write_dataset(const std::filesystem::path& path, const SensorArray& array);

}  // namespace plumeloc
