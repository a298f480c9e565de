#include <array>
#include <cmath>
#include <string>

#include "scatterkit/errors.hpp"
#include "scatterkit/scattering.hpp"

namespace scatterkit {
namespace {

// Average of the two q-shift lowpass trees, normalized to unit DC gain.
// Symmetric about the midpoint between taps 6 and 7, so each decimated
// output sits at the centre of the pair of samples it summarizes.
std::array<double, 14> make_averaging_filter() {
  const auto& h0a = WaveletFilterSet::standard().qshift().h0a;
  const auto& h0b = WaveletFilterSet::standard().qshift().h0b;
  std::array<double, 14> h{};
  double sum = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    h[n] = h0a[n] + h0b[n];
    sum += h[n];
  }
  for (auto& v : h) v /= sum;
  return h;
}

const std::array<double, 14>& filter() {
  static const auto h = make_averaging_filter();
  return h;
}

constexpr std::ptrdiff_t kCenter = 7;

// y[k] = sum_n h[n] x[ext(2k + 7 - n)], along columns.
RealImage decimate_columns(const RealImage& x) {
  if (x.rows() % 2 != 0) throw DimensionError("lowpass stage needs an even number of samples");
  const auto& h = filter();
  const auto n_in = static_cast<std::ptrdiff_t>(x.rows());
  RealImage y(x.rows() / 2, x.cols());
  for (std::size_t k = 0; k < y.rows(); ++k) {
    auto out = y.row(k);
    for (std::size_t n = 0; n < h.size(); ++n) {
      const auto src = detail::reflect_index(
          2 * static_cast<std::ptrdiff_t>(k) + kCenter - static_cast<std::ptrdiff_t>(n), n_in);
      auto in = x.row(static_cast<std::size_t>(src));
      for (std::size_t c = 0; c < x.cols(); ++c) out[c] += h[n] * in[c];
    }
  }
  return y;
}

RealImage decimate_columns_adjoint(const RealImage& y) {
  const auto& h = filter();
  const auto n_out = static_cast<std::ptrdiff_t>(2 * y.rows());
  RealImage x(2 * y.rows(), y.cols());
  for (std::size_t k = 0; k < y.rows(); ++k) {
    auto in = y.row(k);
    for (std::size_t n = 0; n < h.size(); ++n) {
      const auto dst = detail::reflect_index(
          2 * static_cast<std::ptrdiff_t>(k) + kCenter - static_cast<std::ptrdiff_t>(n), n_out);
      auto out = x.row(static_cast<std::size_t>(dst));
      for (std::size_t c = 0; c < y.cols(); ++c) out[c] += h[n] * in[c];
    }
  }
  return x;
}

}  // namespace

std::span<const double> averaging_filter() { return filter(); }

RealImage lowpass_stage(const RealImage& image) {
  return transpose(decimate_columns(transpose(decimate_columns(image))));
}

RealImage lowpass_stage_adjoint(const RealImage& coarse) {
  return decimate_columns_adjoint(transpose(decimate_columns_adjoint(transpose(coarse))));
}

RealImage lowpass_project(const RealImage& values, int from_scale, int J) {
  if (from_scale < 0) throw ParameterError("scale must be >= 0");
  if (from_scale > J) {
    throw ParameterError("cannot average a signal at scale " + std::to_string(from_scale) +
                         " onto the coarser-than-signal grid of J = " + std::to_string(J));
  }
  const std::size_t multiple = std::size_t{1} << (J - from_scale);
  if (values.rows() % multiple != 0 || values.cols() % multiple != 0) {
    throw DimensionError("signal of shape " + std::to_string(values.rows()) + "x" +
                         std::to_string(values.cols()) + " is not divisible by " +
                         std::to_string(multiple) + " for " + std::to_string(J - from_scale) +
                         " averaging stages");
  }
  RealImage out = values;
  for (int s = from_scale; s < J; ++s) out = lowpass_stage(out);
  return out;
}

RealImage lowpass_project(const PropagatedSignal& u, const ScatterConfig& config) {
  return lowpass_project(u.values, u.scale, config.J);
}

}  // namespace scatterkit
