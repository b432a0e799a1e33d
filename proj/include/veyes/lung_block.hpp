#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veyes/dicom.hpp"

namespace veyes {

/// Contiguous lung-only volume, depth x rows x cols, HU as clamped int16.
struct LungBlock {
  int depth = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::int16_t> voxels;  // C order: [slice][row][col]
  std::string series_uid;
  std::string patient_id;
  int start = 0;  // inclusive indices into the sorted series
  int end = 0;

  std::int16_t at(int d, int r, int c) const {
    return voxels[(static_cast<std::size_t>(d) * rows + r) * cols + c];
  }
};

/// Rounds HU half away from zero and clamps to the int16 range.
std::int16_t quantize_hu(float v);

/// Packs slices [start, end] of a z-sorted slice list into a LungBlock.
LungBlock quantize_block(const std::vector<HuSlice>& slices, int start, int end);

}  // namespace veyes
