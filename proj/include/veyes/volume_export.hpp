#pragma once

#include <cstdint>
#include <filesystem>

#include "veyes/lung_block.hpp"
#include "veyes/series_qc.hpp"

namespace veyes {

struct WindowConfig {
  double center = -500.0;
  double width = 1500.0;
};

/// NPY v1.0, dtype '<i2', C order, header padded to a 64-byte multiple.
void write_npy_int16(const LungBlock& block, const std::filesystem::path& path);

/// Reads a 3-D '<i2' NPY volume written by write_npy_int16 (or compatible).
LungBlock read_npy_int16(const std::filesystem::path& path);

/// Writes out_root/<patient_id>/<series_uid>/lung_block.npy for an accepted
/// outcome. Throws duplicate_output when the file exists and overwrite is
/// off.
std::filesystem::path export_block(const SeriesOutcome& outcome, const LungBlock& block,
                                   const std::filesystem::path& out_root, bool overwrite);

/// Clips to [center - width/2, center + width/2] and maps linearly onto
/// 0..255, rounding half away from zero.
std::uint8_t window_rescale(double hu, const WindowConfig& cfg);

/// Binary PGM (P5) of windowed slices tiled row-major; unused trailing
/// tiles are black.
void write_montage_pgm(const LungBlock& block, const std::filesystem::path& path,
                       int columns, const WindowConfig& cfg = {});

}  // namespace veyes
