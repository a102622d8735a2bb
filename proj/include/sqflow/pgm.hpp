#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sqflow/core_grid.hpp"
#include "sqflow/pattern.hpp"

namespace sqflow {

/// Binary PGM (P5), maxval 255, optional single-line comment in the header.
void write_pgm(const std::filesystem::path& file, int width, int height,
               const std::vector<uint8_t>& pixels, const std::string& comment = "");

/// Imprint image as pixels: 255 = wet, 0 = dry; row 0 is the top scanline.
std::vector<uint8_t> render_imprint(const ImprintImage& img);

/// Imprint with the droplet pattern overlaid: wet pixels 255, dry pixels in
/// an On nozzle block 128, other pixels 0. `cells_per_pitch` maps nozzle
/// (i,j) to its cell block.
std::vector<uint8_t> render_overlay(const ImprintImage& img, const DropPattern& dp,
                                    int cells_per_pitch);

}  // namespace sqflow
