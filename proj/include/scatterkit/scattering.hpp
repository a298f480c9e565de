#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "scatterkit/dtcwt.hpp"
#include "scatterkit/image.hpp"

namespace scatterkit {

enum class ColorMode {
  /// Colour kept only in S0; orders >= 1 run on BT.601 luma.
  SplitLuminance,
  /// Every colour plane is scattered independently.
  PerChannel,
};

std::string to_string(ColorMode mode);
ColorMode parse_color_mode(const std::string& text);

struct ScatterConfig {
  static constexpr int kL = kOrientations;

  int J = 4;
  int m = 2;
  ColorMode color_mode = ColorMode::SplitLuminance;
  // Size corpus images are brought to before scattering.
  std::size_t input_rows = 64;
  std::size_t input_cols = 64;

  /// Throws ParameterError when J < 1, m outside 1..2 or input size is zero.
  void validate() const;

  friend bool operator==(const ScatterConfig&, const ScatterConfig&) = default;
};

/// Plane value used by descriptors of luminance channels.
inline constexpr int kLumaPlane = -1;

/// What one output channel measures. Unused path fields are zero; scales are
/// 1-based and orientations index kBandAnglesDegrees.
struct ChannelDescriptor {
  int order = 0;
  int plane = 0;
  int j1 = 0;
  int theta1 = 0;
  int j2 = 0;
  int theta2 = 0;

  std::string label() const;
  friend bool operator==(const ChannelDescriptor&, const ChannelDescriptor&) = default;
};

/// Channel layout: all order-0 channels, then order 1, then order 2; within an
/// order by plane, then lexicographically by (j1, theta1, j2, theta2).
std::vector<ChannelDescriptor> build_channel_map(const ScatterConfig& config, int color_planes);

/// 3 + LJ + L^2 J(J-1)/2 for split-luminance RGB with m = 2.
std::size_t channel_count(const ScatterConfig& config, int color_planes);

/// Stacked scattering coefficients on the 2^-J grid.
struct ScatterOutput {
  std::vector<RealImage> channels;
  std::vector<ChannelDescriptor> channel_map;
  std::size_t padded_rows = 0;
  std::size_t padded_cols = 0;
  CropRecord crop;
  int color_planes = 0;

  std::size_t rows() const noexcept { return channels.empty() ? 0 : channels.front().rows(); }
  std::size_t cols() const noexcept { return channels.empty() ? 0 : channels.front().cols(); }
  std::size_t channel_count() const noexcept { return channels.size(); }

  double at(std::size_t r, std::size_t c, std::size_t channel) const {
    return channels.at(channel)(r, c);
  }

  /// Row-major (H, W, C) values, channel fastest.
  std::vector<double> interleaved() const;
};

using BandSet = std::array<ComplexImage, kOrientations>;

/// Unit-modulus phases of every discarded modulus, for one wavelet plane.
struct PlanePhases {
  // order1[j1-1][theta1], on the 2^-j1 grid.
  std::vector<BandSet> order1;
  // order2[j1-1][theta1][j2-j1-1][theta2], on the 2^-j2 grid.
  std::vector<std::array<std::vector<BandSet>, kOrientations>> order2;
};

/// One entry per wavelet plane: the luma plane for split-luminance, each
/// colour plane for per-channel.
struct PhaseStore {
  std::vector<PlanePhases> planes;

  const ComplexImage& order1(std::size_t plane, int j1, int theta1) const;
  const ComplexImage& order2(std::size_t plane, int j1, int theta1, int j2, int theta2) const;
};

/// A modulus image U_m on the 2^-scale grid.
struct PropagatedSignal {
  RealImage values;
  int order = 0;
  int scale = 0;
  ChannelDescriptor path;
};

struct ScatterResult {
  ScatterOutput output;
  PhaseStore phases;
};

/// Full cascade: pads to a multiple of 2^J, computes S0 for each colour plane
/// and S1/S2 through DT-CWT + modulus stages, saving every phase.
ScatterResult scatter(const PlanarImage& image, const ScatterConfig& config);

struct LuminanceSplit {
  std::vector<RealImage> color_planes;
  RealImage luma;
};

/// BT.601 luma (0.299, 0.587, 0.114) alongside the untouched colour planes.
LuminanceSplit luminance_split(const PlanarImage& image);

/// The 14-tap symmetric lowpass used by every averaging stage; sums to 1.
std::span<const double> averaging_filter();

/// One separable lowpass + decimate-by-2 stage (half-sample symmetric
/// extension). Both dimensions must be even.
RealImage lowpass_stage(const RealImage& image);

/// Exact adjoint of lowpass_stage: zero-insertion upsampling followed by the
/// mirrored filter, with the extension folded back onto the interior.
RealImage lowpass_stage_adjoint(const RealImage& coarse);

/// phi_J averaging of a signal on the 2^-from_scale grid down to the 2^-J
/// grid: J - from_scale cascaded stages (identity when they coincide).
RealImage lowpass_project(const RealImage& values, int from_scale, int J);
RealImage lowpass_project(const PropagatedSignal& u, const ScatterConfig& config);

}  // namespace scatterkit
