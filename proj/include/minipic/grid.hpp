#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace minipic {

/// Ghost layers on every side of patch and bin-subgrid arrays.
inline constexpr int kGhost = 3;

/// Dense 2D array over nx x ny cells plus kGhost ghost cells per side.
/// Logical indices run over [-kGhost, nx + kGhost); y is the contiguous axis.
template <class T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int nx, int ny)
      : nx_(nx), ny_(ny), stride_(ny + 2 * kGhost),
        data_(static_cast<std::size_t>(nx + 2 * kGhost) * (ny + 2 * kGhost), T{}) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int stride() const { return stride_; }

  T& operator()(int i, int j) {
    assert(contains(i, j));
    return data_[offset(i, j)];
  }
  const T& operator()(int i, int j) const {
    assert(contains(i, j));
    return data_[offset(i, j)];
  }

  bool contains(int i, int j) const {
    return i >= -kGhost && i < nx_ + kGhost && j >= -kGhost && j < ny_ + kGhost;
  }
  bool interior(int i, int j) const { return i >= 0 && i < nx_ && j >= 0 && j < ny_; }

  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>(i + kGhost) * stride_ + static_cast<std::size_t>(j + kGhost);
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }
  std::span<T> raw() { return data_; }
  std::span<const T> raw() const { return data_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  int stride_ = 0;
  std::vector<T> data_;
};

/// floor(v) as int for finite v in int range, without a libm call.
inline int floor_int(double v) {
  const int i = static_cast<int>(v);
  return i - (v < static_cast<double>(i));
}

/// Currents and charge are accumulated in 2^-44 fixed point so that the sum
/// at a node is independent of the order in which contributions arrive.
namespace fixed {

inline constexpr double kScale = 0x1p44;
inline constexpr double kInvScale = 0x1p-44;

inline std::int64_t encode(double v) { return static_cast<std::int64_t>(std::llrint(v * kScale)); }
inline double decode(std::int64_t v) { return static_cast<double>(v) * kInvScale; }

/// Two's-complement wrapping add; no signed-overflow UB.
inline void add(std::int64_t& acc, std::int64_t v) {
  acc = static_cast<std::int64_t>(static_cast<std::uint64_t>(acc) + static_cast<std::uint64_t>(v));
}
inline void add(std::int64_t& acc, double v) { add(acc, encode(v)); }

}  // namespace fixed

using FixedGrid = Grid2D<std::int64_t>;

}  // namespace minipic
