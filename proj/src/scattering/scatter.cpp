#include <cmath>
#include <string>

#include "scatterkit/errors.hpp"
#include "scatterkit/scattering.hpp"

namespace scatterkit {
namespace {

struct ModulusPhase {
  RealImage modulus;
  ComplexImage phase;
};

ModulusPhase split_modulus(const ComplexImage& w) {
  ModulusPhase out{RealImage(w.rows(), w.cols()), ComplexImage(w.rows(), w.cols())};
  auto wv = w.values();
  auto mv = out.modulus.values();
  auto pv = out.phase.values();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    const double mag = std::abs(wv[i]);
    mv[i] = mag;
    pv[i] = mag > 0.0 ? wv[i] / mag : Complex(1.0, 0.0);
  }
  return out;
}

void check_finite(const PlanarImage& image) {
  for (std::size_t p = 0; p < image.channels(); ++p) {
    const auto& plane = image.planes[p];
    if (plane.rows() != image.rows() || plane.cols() != image.cols())
      throw DimensionError("image planes differ in shape");
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (!std::isfinite(plane.values()[i])) {
        throw ValidationError("non-finite pixel value in plane " + std::to_string(p) +
                              " at flat index " + std::to_string(i));
      }
    }
  }
}

struct PlaneScatter {
  std::vector<RealImage> order1;
  std::vector<RealImage> order2;
  PlanePhases phases;
};

PlaneScatter scatter_plane(const RealImage& plane, const ScatterConfig& config,
                           const Dtcwt& transform) {
  const int J = config.J;
  PlaneScatter out;
  const ComplexPyramid w1 = transform.forward(plane, J);
  std::vector<std::array<RealImage, kOrientations>> u1(static_cast<std::size_t>(J));
  out.phases.order1.resize(static_cast<std::size_t>(J));
  for (int j1 = 1; j1 <= J; ++j1) {
    for (int t1 = 0; t1 < kOrientations; ++t1) {
      auto mp = split_modulus(w1.band(j1, t1));
      out.order1.push_back(lowpass_project(mp.modulus, j1, J));
      u1[static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)] = std::move(mp.modulus);
      out.phases.order1[static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)] =
          std::move(mp.phase);
    }
  }
  if (config.m < 2) return out;

  out.phases.order2.resize(static_cast<std::size_t>(J));
  for (int j1 = 1; j1 <= J; ++j1) {
    for (int t1 = 0; t1 < kOrientations; ++t1) {
      auto& path_phases =
          out.phases.order2[static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)];
      if (j1 == J) continue;
      // |W1| lives on the 2^-j1 grid; J - j1 further levels reach the 2^-J grid.
      const ComplexPyramid w2 =
          transform.forward(u1[static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)],
                            J - j1);
      path_phases.resize(static_cast<std::size_t>(J - j1));
      for (int j2 = j1 + 1; j2 <= J; ++j2) {
        for (int t2 = 0; t2 < kOrientations; ++t2) {
          auto mp = split_modulus(w2.band(j2 - j1, t2));
          out.order2.push_back(lowpass_project(mp.modulus, j2, J));
          path_phases[static_cast<std::size_t>(j2 - j1 - 1)][static_cast<std::size_t>(t2)] =
              std::move(mp.phase);
        }
      }
    }
  }
  return out;
}

}  // namespace

LuminanceSplit luminance_split(const PlanarImage& image) {
  if (image.channels() != 3)
    throw ValidationError("luminance split needs 3 planes, got " +
                          std::to_string(image.channels()));
  LuminanceSplit out{image.planes, RealImage(image.rows(), image.cols())};
  const auto r = image.planes[0].values();
  const auto g = image.planes[1].values();
  const auto b = image.planes[2].values();
  auto y = out.luma.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

ScatterResult scatter(const PlanarImage& image, const ScatterConfig& config) {
  config.validate();
  if (image.channels() != 1 && image.channels() != 3)
    throw ValidationError("images must have 1 or 3 planes, got " +
                          std::to_string(image.channels()));
  if (image.rows() == 0 || image.cols() == 0) throw DimensionError("empty image");
  check_finite(image);

  const int color_planes = static_cast<int>(image.channels());
  ScatterResult result;
  ScatterOutput& out = result.output;
  out.color_planes = color_planes;
  out.channel_map = build_channel_map(config, color_planes);

  const PlanarImage padded = pad_planes(image, config.J, &out.crop);
  out.padded_rows = padded.rows();
  out.padded_cols = padded.cols();

  std::vector<RealImage> wavelet_planes;
  if (color_planes == 1)
    wavelet_planes.push_back(padded.planes[0]);
  else if (config.color_mode == ColorMode::SplitLuminance)
    wavelet_planes.push_back(luminance_split(padded).luma);
  else
    wavelet_planes = padded.planes;

  for (const auto& plane : padded.planes) out.channels.push_back(lowpass_project(plane, 0, config.J));

  const Dtcwt transform;
  std::vector<PlaneScatter> per_plane;
  for (const auto& plane : wavelet_planes) per_plane.push_back(scatter_plane(plane, config, transform));
  for (auto& ps : per_plane)
    for (auto& ch : ps.order1) out.channels.push_back(std::move(ch));
  for (auto& ps : per_plane)
    for (auto& ch : ps.order2) out.channels.push_back(std::move(ch));
  for (auto& ps : per_plane) result.phases.planes.push_back(std::move(ps.phases));

  if (out.channels.size() != out.channel_map.size())
    throw ConsistencyError("internal channel bookkeeping mismatch");
  return result;
}

}  // namespace scatterkit
