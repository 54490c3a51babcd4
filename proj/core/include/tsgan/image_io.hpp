#pragma once

#include <string>
#include <vector>

#include "tsgan/raster.hpp"

namespace tsgan {

/// Write a raster as an 8-bit PPM (3 channels) or PGM (1 channel), mapping
/// [0,1] onto [0,255]. Used by the report subcommand for inspection grids.
void write_ppm(const Raster& r, const std::string& path);

/// Lay out same-height tiles left to right with a gutter and write one image.
/// Single-channel tiles are replicated to gray; all values clamped to [0,1].
void write_tile_row(const std::vector<Raster>& tiles, const std::string& path,
                    int gutter = 4);

}  // namespace tsgan
