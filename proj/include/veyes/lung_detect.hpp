#pragma once

#include <cstdint>

#include "veyes/dicom.hpp"
#include "veyes/image.hpp"

namespace veyes {

struct LungDetectConfig {
  double hu_low = -950.0;
  double hu_high = -700.0;
  int open_radius = 2;
  int close_radius = 5;
  double min_region_frac = 0.01;
  double min_lung_ratio = 0.05;
  int connectivity = 8;  // 4 or 8
};

struct SliceLungStats {
  Mask mask;
  double area_ratio = 0.0;
  bool lung_flag = false;
};

/// mask pixel true iff low <= value <= high (inclusive bounds).
Mask threshold_hu(const HuSlice& slice, double low, double high);

/// Erosion with the disk SE {(dx,dy): dx^2+dy^2 <= r^2}.
/// Out-of-bounds neighbours count as foreground.
Mask erode_disk(const Mask& mask, int radius);

/// Dilation with the same SE; out-of-bounds neighbours count as background.
Mask dilate_disk(const Mask& mask, int radius);

Mask morph_open(const Mask& mask, int radius);
Mask morph_close(const Mask& mask, int radius);

/// Keeps connected components whose pixel area is strictly greater than
/// min_region_frac * rows * cols.
Mask filter_components(const Mask& mask, double min_region_frac, int connectivity);

/// threshold -> open -> close -> component filter; area ratio over the
/// full in-plane grid, flag at min_lung_ratio (inclusive).
SliceLungStats detect_lung_slice(const HuSlice& slice, const LungDetectConfig& cfg);

}  // namespace veyes
