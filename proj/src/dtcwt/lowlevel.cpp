#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "scatterkit/dtcwt.hpp"
#include "scatterkit/errors.hpp"

namespace scatterkit::detail {
namespace {

using Index = std::ptrdiff_t;

// Valid-mode convolution down the columns of the rows of x selected by `rows`:
//   out[k] = sum_i h[i] * x[rows[k + m - 1 - i]],  k = 0 .. rows.size() - m
// Output row k is accumulated into y row (first + k * step).
void convolve_selected(const RealImage& x, std::span<const Index> rows, std::span<const double> h,
                       RealImage& y, std::size_t first, std::size_t step) {
  const Index m = static_cast<Index>(h.size());
  const Index n_out = static_cast<Index>(rows.size()) - m + 1;
  const std::size_t cols = x.cols();
  for (Index k = 0; k < n_out; ++k) {
    auto out = y.row(first + static_cast<std::size_t>(k) * step);
    for (Index i = 0; i < m; ++i) {
      const double w = h[static_cast<std::size_t>(i)];
      if (w == 0.0) continue;
      auto in = x.row(static_cast<std::size_t>(rows[static_cast<std::size_t>(k + m - 1 - i)]));
      for (std::size_t c = 0; c < cols; ++c) out[c] += w * in[c];
    }
  }
}

std::vector<Index> extension(Index from, Index to, Index n) {
  std::vector<Index> xe;
  xe.reserve(static_cast<std::size_t>(to - from));
  for (Index i = from; i < to; ++i) xe.push_back(reflect_index(i, n));
  return xe;
}

// Rows xe[t + offset] for t in [start, stop) stepping by `stride`.
std::vector<Index> pick(const std::vector<Index>& xe, Index start, Index stop, Index stride,
                        Index offset) {
  std::vector<Index> rows;
  for (Index t = start; t < stop; t += stride) rows.push_back(xe[static_cast<std::size_t>(t + offset)]);
  return rows;
}

std::vector<double> every_other(std::span<const double> h, std::size_t start) {
  std::vector<double> out;
  for (std::size_t i = start; i < h.size(); i += 2) out.push_back(h[i]);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) noexcept {
  const std::ptrdiff_t period = 2 * n;
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  return m >= n ? period - 1 - m : m;
}

RealImage colfilter(const RealImage& x, std::span<const double> h) {
  const Index r = static_cast<Index>(x.rows());
  const Index m = static_cast<Index>(h.size());
  const Index m2 = m / 2;
  const auto xe = extension(-m2, r + m2, r);
  RealImage y(static_cast<std::size_t>(r + 2 * m2 - m + 1), x.cols());
  convolve_selected(x, xe, h, y, 0, 1);
  return y;
}

RealImage coldfilt(const RealImage& x, std::span<const double> ha, std::span<const double> hb) {
  const Index r = static_cast<Index>(x.rows());
  if (r % 4 != 0) throw DimensionError("coldfilt: number of rows must be a multiple of 4");
  if (ha.size() != hb.size()) throw ParameterError("coldfilt: ha and hb lengths differ");
  const Index m = static_cast<Index>(ha.size());
  if (m % 2 != 0) throw ParameterError("coldfilt: filter lengths must be even");

  const auto xe = extension(-m, r + m, r);
  const auto hao = every_other(ha, 0);
  const auto hae = every_other(ha, 1);
  const auto hbo = every_other(hb, 0);
  const auto hbe = every_other(hb, 1);
  const Index stop = r + 2 * m - 2;

  RealImage y(static_cast<std::size_t>(r / 2), x.cols());
  // Tree a lands on even output rows when the two filters are "in phase".
  const bool in_phase = dot(ha, hb) > 0.0;
  const std::size_t s1 = in_phase ? 0 : 1;
  const std::size_t s2 = in_phase ? 1 : 0;
  convolve_selected(x, pick(xe, 5, stop, 4, -1), hao, y, s1, 2);
  convolve_selected(x, pick(xe, 5, stop, 4, -3), hae, y, s1, 2);
  convolve_selected(x, pick(xe, 5, stop, 4, 0), hbo, y, s2, 2);
  convolve_selected(x, pick(xe, 5, stop, 4, -2), hbe, y, s2, 2);
  return y;
}

RealImage colifilt(const RealImage& x, std::span<const double> ha, std::span<const double> hb) {
  const Index r = static_cast<Index>(x.rows());
  if (r % 2 != 0) throw DimensionError("colifilt: number of rows must be a multiple of 2");
  if (ha.size() != hb.size()) throw ParameterError("colifilt: ha and hb lengths differ");
  const Index m = static_cast<Index>(ha.size());
  if (m % 2 != 0) throw ParameterError("colifilt: filter lengths must be even");
  const Index m2 = m / 2;

  RealImage y(static_cast<std::size_t>(2 * r), x.cols());
  if (std::all_of(x.values().begin(), x.values().end(), [](double v) { return v == 0.0; }))
    return y;

  const auto xe = extension(-m2, r + m2, r);
  const auto hao = every_other(ha, 0);
  const auto hae = every_other(ha, 1);
  const auto hbo = every_other(hb, 0);
  const auto hbe = every_other(hb, 1);
  const bool in_phase = dot(ha, hb) > 0.0;

  if (m2 % 2 == 0) {
    // m/2 even: t starts on "d" samples.
    const Index start = 3;
    const Index stop = r + m;
    const Index da = in_phase ? 0 : -1;
    const Index db = in_phase ? -1 : 0;
    convolve_selected(x, pick(xe, start, stop, 2, db - 2), hae, y, 0, 4);
    convolve_selected(x, pick(xe, start, stop, 2, da - 2), hbe, y, 1, 4);
    convolve_selected(x, pick(xe, start, stop, 2, db), hao, y, 2, 4);
    convolve_selected(x, pick(xe, start, stop, 2, da), hbo, y, 3, 4);
  } else {
    // m/2 odd: t starts on "b" samples.
    const Index start = 2;
    const Index stop = r + m - 1;
    const Index da = in_phase ? 0 : -1;
    const Index db = in_phase ? -1 : 0;
    convolve_selected(x, pick(xe, start, stop, 2, db), hao, y, 0, 4);
    convolve_selected(x, pick(xe, start, stop, 2, da), hbo, y, 1, 4);
    convolve_selected(x, pick(xe, start, stop, 2, db), hae, y, 2, 4);
    convolve_selected(x, pick(xe, start, stop, 2, da), hbe, y, 3, 4);
  }
  return y;
}

std::array<ComplexImage, 2> q2c(const RealImage& y) {
  if (y.rows() % 2 != 0 || y.cols() % 2 != 0)
    throw DimensionError("q2c: quad image dimensions must be even");
  const std::size_t rows = y.rows() / 2;
  const std::size_t cols = y.cols() / 2;
  const double s = std::sqrt(0.5);
  std::array<ComplexImage, 2> z{ComplexImage(rows, cols), ComplexImage(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      // Quad corners a b / c d: p = (a + jb)/sqrt2, q = (d - jc)/sqrt2.
      const Complex p(s * y(2 * r, 2 * c), s * y(2 * r, 2 * c + 1));
      const Complex q(s * y(2 * r + 1, 2 * c + 1), -s * y(2 * r + 1, 2 * c));
      z[0](r, c) = p - q;
      z[1](r, c) = p + q;
    }
  }
  return z;
}

RealImage c2q(const ComplexImage& w0, const ComplexImage& w1) {
  if (!w0.same_shape(w1)) throw DimensionError("c2q: band pair shapes differ");
  const double s = std::sqrt(0.5);
  RealImage x(2 * w0.rows(), 2 * w0.cols());
  for (std::size_t r = 0; r < w0.rows(); ++r) {
    for (std::size_t c = 0; c < w0.cols(); ++c) {
      const Complex p = s * (w0(r, c) + w1(r, c));
      const Complex q = s * (w0(r, c) - w1(r, c));
      x(2 * r, 2 * c) = p.real();
      x(2 * r, 2 * c + 1) = p.imag();
      x(2 * r + 1, 2 * c) = q.imag();
      x(2 * r + 1, 2 * c + 1) = -q.real();
    }
  }
  return x;
}

}  // namespace scatterkit::detail
