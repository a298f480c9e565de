#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "scatterkit/dtcwt.hpp"
#include "scatterkit/image.hpp"

namespace scatterkit {

/// Length of the conjugate-extended orientation axis.
inline constexpr int kExtendedOrientations = 2 * kOrientations;

/// Complex kernel of shape (h, w, 12), h and w in {1, 3}. Element (a, b, t)
/// weights band t at spatial offset (a - h/2, b - w/2).
class CrossOrientFilter {
 public:
  CrossOrientFilter() = default;
  CrossOrientFilter(std::size_t h, std::size_t w, std::string name = {});
  /// 1x1x12 filter from its orientation coefficients.
  CrossOrientFilter(std::span<const Complex> orientation, std::string name = {});

  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  Complex& at(std::size_t a, std::size_t b, int theta);
  const Complex& at(std::size_t a, std::size_t b, int theta) const;

  std::span<Complex> values() noexcept { return kernel_; }
  std::span<const Complex> values() const noexcept { return kernel_; }

  CrossOrientFilter scaled(Complex factor) const;

  friend bool operator==(const CrossOrientFilter&, const CrossOrientFilter&) = default;

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::vector<Complex> kernel_;
  std::string name_;
};

/// bands12[t] for t < 6 are the DT-CWT bands of one scale; bands12[t + 6] is
/// the conjugate of bands12[t] (the same band rotated by 180 degrees).
struct ExtendedBands {
  std::array<ComplexImage, kExtendedOrientations> bands12;

  std::size_t rows() const noexcept { return bands12[0].rows(); }
  std::size_t cols() const noexcept { return bands12[0].cols(); }
};

/// Throws ValidationError unless exactly 6 equally shaped bands are given.
ExtendedBands extend_orientations(std::span<const ComplexImage> bands);

/// V(r, c) = sum over (a, b, t) of bands12[t](r + a - h/2, c + b - w/2) * F(a, b, t),
/// symmetric extension at the borders; same size as the bands.
ComplexImage apply_cross_filter(const ExtendedBands& w, const CrossOrientFilter& f);

/// U' = |V|.
RealImage modulus_v(const ComplexImage& v);

/// Circular shift of the orientation axis: result(t + steps) = f(t).
CrossOrientFilter roll_filter(const CrossOrientFilter& f, int steps);

/// K unit-norm 1x1x12 filters, window(t) * exp(j k 2 pi t / 12) for k < K,
/// with a periodic Gaussian window (sigma 2). Filters k >= 1 are made zero
/// mean and orthogonal to their predecessors. Throws ParameterError unless
/// 1 <= K <= 6.
std::vector<CrossOrientFilter> make_rototranslation_bank(int K);

enum class VPart { Real, Imaginary };

/// Pixel-space pattern of a single V = 1 (or j) at the centre of the scale-j
/// band grid of a rows x cols image: adjoint of the cross filter into the 12
/// bands, conjugate bands folded back, then the DT-CWT inverse.
RealImage reconstruct_filter_shape(const CrossOrientFilter& f, VPart part, int scale,
                                   std::size_t rows = 64, std::size_t cols = 64);

/// <a, b> / (|a| |b|); zero when either image is all zero.
double normalized_dot(const RealImage& a, const RealImage& b);

/// Built-in filters.
CrossOrientFilter corner_filter();
std::vector<CrossOrientFilter> onehot_gallery();
std::vector<CrossOrientFilter> corner_gallery();
/// Named 3x3x12 examples: corner, cross, curve and ring.
std::vector<CrossOrientFilter> spatial_gallery();

}  // namespace scatterkit
