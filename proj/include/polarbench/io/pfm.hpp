// SPDX-License-Identifier: Apache-2.0
#pragma once

// Portable float map, single channel ("Pf"), little-endian, rows bottom-up.

#include <filesystem>

#include "polarbench/image.hpp"

namespace polarbench::io {

/// Writes plane `channel` of `m` as float32. Throws IoError on failure.
void write_pfm(const std::filesystem::path& path, const Map& m, int channel = 0);
void write_pfm(const std::filesystem::path& path, const Mask& m);

/// Reads a "Pf" file of either endianness. Throws IoError for anything else.
Map read_pfm(const std::filesystem::path& path);
Mask read_pfm_mask(const std::filesystem::path& path);

}  // namespace polarbench::io
