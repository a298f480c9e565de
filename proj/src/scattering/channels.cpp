#include <sstream>

#include "scatterkit/errors.hpp"
#include "scatterkit/scattering.hpp"

namespace scatterkit {

std::string to_string(ColorMode mode) {
  return mode == ColorMode::SplitLuminance ? "split-luminance" : "per-channel";
}

ColorMode parse_color_mode(const std::string& text) {
  if (text == "split-luminance") return ColorMode::SplitLuminance;
  if (text == "per-channel") return ColorMode::PerChannel;
  throw ParameterError("unknown color mode '" + text +
                       "' (expected split-luminance or per-channel)");
}

void ScatterConfig::validate() const {
  if (J < 1) throw ParameterError("J must be >= 1, got " + std::to_string(J));
  if (m < 1) throw ParameterError("order m must be >= 1, got " + std::to_string(m));
  if (m > 2) throw ParameterError("unsupported scattering order m = " + std::to_string(m) +
                                  " (only m <= 2 is implemented)");
  if (input_rows == 0 || input_cols == 0) throw ParameterError("input size must be non-zero");
}

std::string ChannelDescriptor::label() const {
  std::ostringstream out;
  out << "S" << order;
  if (plane == kLumaPlane)
    out << " luma";
  else
    out << " plane" << plane;
  if (order >= 1)
    out << " j1=" << j1 << " theta1=" << kBandAnglesDegrees[static_cast<std::size_t>(theta1)];
  if (order >= 2)
    out << " j2=" << j2 << " theta2=" << kBandAnglesDegrees[static_cast<std::size_t>(theta2)];
  return out.str();
}

std::vector<ChannelDescriptor> build_channel_map(const ScatterConfig& config, int color_planes) {
  config.validate();
  if (color_planes != 1 && color_planes != 3)
    throw ValidationError("images must have 1 or 3 planes, got " + std::to_string(color_planes));
  const bool split = config.color_mode == ColorMode::SplitLuminance || color_planes == 1;
  std::vector<int> wavelet_planes;
  if (split)
    wavelet_planes.push_back(color_planes == 1 ? 0 : kLumaPlane);
  else
    for (int p = 0; p < color_planes; ++p) wavelet_planes.push_back(p);

  std::vector<ChannelDescriptor> map;
  for (int p = 0; p < color_planes; ++p) map.push_back({0, p});
  for (int plane : wavelet_planes)
    for (int j1 = 1; j1 <= config.J; ++j1)
      for (int t1 = 0; t1 < kOrientations; ++t1) map.push_back({1, plane, j1, t1});
  if (config.m >= 2) {
    for (int plane : wavelet_planes)
      for (int j1 = 1; j1 <= config.J; ++j1)
        for (int t1 = 0; t1 < kOrientations; ++t1)
          for (int j2 = j1 + 1; j2 <= config.J; ++j2)
            for (int t2 = 0; t2 < kOrientations; ++t2) map.push_back({2, plane, j1, t1, j2, t2});
  }
  return map;
}

std::size_t channel_count(const ScatterConfig& config, int color_planes) {
  return build_channel_map(config, color_planes).size();
}

std::vector<double> ScatterOutput::interleaved() const {
  std::vector<double> out;
  out.reserve(rows() * cols() * channel_count());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      for (const auto& ch : channels) out.push_back(ch(r, c));
  return out;
}

const ComplexImage& PhaseStore::order1(std::size_t plane, int j1, int theta1) const {
  return planes.at(plane).order1.at(static_cast<std::size_t>(j1 - 1)).at(
      static_cast<std::size_t>(theta1));
}

const ComplexImage& PhaseStore::order2(std::size_t plane, int j1, int theta1, int j2,
                                       int theta2) const {
  return planes.at(plane)
      .order2.at(static_cast<std::size_t>(j1 - 1))
      .at(static_cast<std::size_t>(theta1))
      .at(static_cast<std::size_t>(j2 - j1 - 1))
      .at(static_cast<std::size_t>(theta2));
}

}  // namespace scatterkit
