#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace veyes {

/// Row-major 2D grid. (r, c) indexing, r in [0, rows), c in [0, cols).
template <typename T>
class Grid {
public:
  Grid() : rows_(0), cols_(0) {}
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {
    assert(rows >= 0 && cols >= 0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows_ && c >= 0 && c < cols_;
  }

  bool same_shape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

private:
  std::size_t index(int r, int c) const {
    assert(in_bounds(r, c));
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_;
  int cols_;
  std::vector<T> data_;
};

/// Binary mask; nonzero = foreground.
using Mask = Grid<std::uint8_t>;

inline std::size_t count_true(const Mask& m) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.size(); ++i) n += (m[i] != 0);
  return n;
}

}  // namespace veyes
