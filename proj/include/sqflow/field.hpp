#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace sqflow {

/// Square cell-centered scalar field, row-major storage.
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(int n, double fill = 0.0)
      : n_(n), data_(static_cast<size_t>(n) * n, fill) {}

  int n() const { return n_; }
  size_t size() const { return data_.size(); }

  double* row(int r) { return data_.data() + static_cast<size_t>(r) * n_; }
  const double* row(int r) const { return data_.data() + static_cast<size_t>(r) * n_; }

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * n_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * n_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Field2D&) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Square boolean grid, row-major (one byte per cell).
class BoolGrid {
 public:
  BoolGrid() = default;
  explicit BoolGrid(int n, bool fill = false)
      : n_(n), data_(static_cast<size_t>(n) * n, fill ? 1 : 0) {}

  int n() const { return n_; }
  size_t size() const { return data_.size(); }

  uint8_t* row(int r) { return data_.data() + static_cast<size_t>(r) * n_; }
  const uint8_t* row(int r) const { return data_.data() + static_cast<size_t>(r) * n_; }

  bool get(int r, int c) const { return data_[static_cast<size_t>(r) * n_ + c] != 0; }
  void set(int r, int c, bool v) { data_[static_cast<size_t>(r) * n_ + c] = v ? 1 : 0; }

  uint8_t* data() { return data_.data(); }
  const uint8_t* data() const { return data_.data(); }

  int count() const {
    int k = 0;
    for (uint8_t b : data_) k += (b != 0);
    return k;
  }

  bool operator==(const BoolGrid&) const = default;

 private:
  int n_ = 0;
  std::vector<uint8_t> data_;
};

/// Half-open index rectangle [r0,r1) x [c0,c1).
struct GridBox {
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;
  bool empty() const { return r1 <= r0 || c1 <= c0; }
  int rows() const { return r1 - r0; }
  int cols() const { return c1 - c0; }
};

/// 90-degree clockwise rotation: cell (r,c) -> (c, n-1-r).
inline Field2D rotate_cw(const Field2D& g) {
  const int n = g.n();
  Field2D out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(c, n - 1 - r) = g(r, c);
  return out;
}

inline BoolGrid rotate_cw(const BoolGrid& g) {
  const int n = g.n();
  BoolGrid out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.set(c, n - 1 - r, g.get(r, c));
  return out;
}

}  // namespace sqflow
