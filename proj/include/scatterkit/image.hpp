#pragma once

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace scatterkit {

using Complex = std::complex<double>;

/// Dense row-major 2-D array.
template <typename T>
class Array2D {
 public:
  using value_type = T;

  Array2D() = default;
  Array2D(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) noexcept {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const noexcept {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  bool same_shape(const Array2D& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealImage = Array2D<double>;
using ComplexImage = Array2D<Complex>;

template <typename T>
Array2D<T> transpose(const Array2D<T>& a) {
  Array2D<T> out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

/// A stack of equally sized real planes, e.g. RGB or a single luminance plane.
struct PlanarImage {
  std::vector<RealImage> planes;

  PlanarImage() = default;
  explicit PlanarImage(std::vector<RealImage> p) : planes(std::move(p)) {}
  PlanarImage(std::size_t count, std::size_t rows, std::size_t cols, double fill = 0.0)
      : planes(count, RealImage(rows, cols, fill)) {}

  std::size_t channels() const noexcept { return planes.size(); }
  std::size_t rows() const noexcept { return planes.empty() ? 0 : planes.front().rows(); }
  std::size_t cols() const noexcept { return planes.empty() ? 0 : planes.front().cols(); }
};

/// (row, col) on some sampling grid.
struct Site {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

}  // namespace scatterkit
