#include "veyes/lung_detect.hpp"

#include <algorithm>
#include <cassert>
#include <vector>

namespace veyes {

namespace {

// Largest dx with dx^2 + dy^2 <= r^2, per |dy|. Integer arithmetic.
std::vector<int> disk_half_widths(int radius) {
  std::vector<int> w(radius + 1);
  for (int dy = 0; dy <= radius; ++dy) {
    int limit = radius * radius - dy * dy;
    int dx = 0;
    while ((dx + 1) * (dx + 1) <= limit) ++dx;
    w[dy] = dx;
  }
  return w;
}

// Per-pixel distance to the nearest target pixel within the same row,
// clamped to `inf` when the row holds none. Row ends do not count as
// targets, which realizes the out-of-bounds conventions. The clamp must
// stay above any usable radius, not just above cols.
Grid<std::int32_t> row_distance(const Mask& mask, bool target_foreground) {
  const int rows = mask.rows(), cols = mask.cols();
  const std::int32_t inf = 1 << 20;
  Grid<std::int32_t> dist(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::uint8_t* m = mask.data() + static_cast<std::size_t>(r) * cols;
    std::int32_t* d = dist.data() + static_cast<std::size_t>(r) * cols;
    std::int32_t run = inf;
    for (int c = 0; c < cols; ++c) {
      run = ((m[c] != 0) == target_foreground) ? 0 : std::min(run + 1, inf);
      d[c] = run;
    }
    run = inf;
    for (int c = cols - 1; c >= 0; --c) {
      run = ((m[c] != 0) == target_foreground) ? 0 : std::min(run + 1, inf);
      d[c] = std::min(d[c], run);
    }
  }
  return dist;
}

}  // namespace

Mask threshold_hu(const HuSlice& slice, double low, double high) {
  assert(low < high);
  Mask out(slice.data.rows(), slice.data.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = slice.data[i];
    out[i] = (v >= low && v <= high) ? 1 : 0;
  }
  return out;
}

// A pixel survives erosion iff no background pixel lies within the disk:
// for every row offset dy, the nearest in-row background must be further
// than the disk's half-width at dy. Rows outside the image pass (outside
// counts as foreground); radii beyond cols+1 never occur in practice.
Mask erode_disk(const Mask& mask, int radius) {
  assert(radius >= 1);
  const int rows = mask.rows(), cols = mask.cols();
  Grid<std::int32_t> bg_dist = row_distance(mask, /*target_foreground=*/false);
  std::vector<int> w = disk_half_widths(radius);

  Mask out(rows, cols, 1);
  for (int r = 0; r < rows; ++r) {
    std::uint8_t* acc = out.data() + static_cast<std::size_t>(r) * cols;
    for (int dy = -radius; dy <= radius; ++dy) {
      int rr = r + dy;
      if (rr < 0 || rr >= rows) continue;
      const std::int32_t* d = bg_dist.data() + static_cast<std::size_t>(rr) * cols;
      const std::int32_t limit = w[dy < 0 ? -dy : dy];
      for (int c = 0; c < cols; ++c) acc[c] &= d[c] > limit;
    }
  }
  return out;
}

// Dual scheme: a pixel turns on iff some foreground pixel lies within the
// disk; outside the image counts as background.
Mask dilate_disk(const Mask& mask, int radius) {
  assert(radius >= 1);
  const int rows = mask.rows(), cols = mask.cols();
  Grid<std::int32_t> fg_dist = row_distance(mask, /*target_foreground=*/true);
  std::vector<int> w = disk_half_widths(radius);

  Mask out(rows, cols, 0);
  for (int r = 0; r < rows; ++r) {
    std::uint8_t* acc = out.data() + static_cast<std::size_t>(r) * cols;
    for (int dy = -radius; dy <= radius; ++dy) {
      int rr = r + dy;
      if (rr < 0 || rr >= rows) continue;
      const std::int32_t* d = fg_dist.data() + static_cast<std::size_t>(rr) * cols;
      const std::int32_t limit = w[dy < 0 ? -dy : dy];
      for (int c = 0; c < cols; ++c) acc[c] |= d[c] <= limit;
    }
  }
  return out;
}

Mask morph_open(const Mask& mask, int radius) {
  return dilate_disk(erode_disk(mask, radius), radius);
}

Mask morph_close(const Mask& mask, int radius) {
  return erode_disk(dilate_disk(mask, radius), radius);
}

Mask filter_components(const Mask& mask, double min_region_frac, int connectivity) {
  assert(connectivity == 4 || connectivity == 8);
  const int rows = mask.rows();
  const int cols = mask.cols();
  const double min_area =
      min_region_frac * static_cast<double>(rows) * static_cast<double>(cols);

  Grid<std::int32_t> labels(rows, cols, 0);
  std::vector<std::size_t> areas{0};  // areas[label]; label 0 = background
  std::vector<std::int32_t> stack;

  static constexpr int dr8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int dc8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int dr4[] = {-1, 0, 0, 1};
  static constexpr int dc4[] = {0, -1, 1, 0};
  const int* drs = connectivity == 8 ? dr8 : dr4;
  const int* dcs = connectivity == 8 ? dc8 : dc4;
  const int nn = connectivity;

  std::int32_t next_label = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!mask(r, c) || labels(r, c)) continue;
      ++next_label;
      std::size_t area = 0;
      labels(r, c) = next_label;
      stack.push_back(r * cols + c);
      while (!stack.empty()) {
        std::int32_t idx = stack.back();
        stack.pop_back();
        ++area;
        int pr = idx / cols, pc = idx % cols;
        for (int k = 0; k < nn; ++k) {
          int qr = pr + drs[k], qc = pc + dcs[k];
          if (qr < 0 || qr >= rows || qc < 0 || qc >= cols) continue;
          if (!mask(qr, qc) || labels(qr, qc)) continue;
          labels(qr, qc) = next_label;
          stack.push_back(qr * cols + qc);
        }
      }
      areas.push_back(area);
    }
  }

  Mask out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      std::int32_t lbl = labels(r, c);
      out(r, c) = (lbl && static_cast<double>(areas[lbl]) > min_area) ? 1 : 0;
    }
  return out;
}

SliceLungStats detect_lung_slice(const HuSlice& slice, const LungDetectConfig& cfg) {
  SliceLungStats stats;
  Mask m = threshold_hu(slice, cfg.hu_low, cfg.hu_high);
  // Empty masks are fixed points of every stage; skip the transforms.
  if (count_true(m) != 0) {
    m = morph_open(m, cfg.open_radius);
    m = morph_close(m, cfg.close_radius);
    m = filter_components(m, cfg.min_region_frac, cfg.connectivity);
  }
  std::size_t area = count_true(m);
  stats.area_ratio = static_cast<double>(area) /
                     (static_cast<double>(m.rows()) * static_cast<double>(m.cols()));
  stats.lung_flag = stats.area_ratio >= cfg.min_lung_ratio;
  stats.mask = std::move(m);
  return stats;
}

}  // namespace veyes
