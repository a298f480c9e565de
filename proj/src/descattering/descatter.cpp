#include <algorithm>
#include <cmath>
#include <string>

#include "scatterkit/descattering.hpp"
#include "scatterkit/errors.hpp"

namespace scatterkit {
namespace {

bool all_zero(const RealImage& image) {
  return std::all_of(image.values().begin(), image.values().end(),
                     [](double v) { return v == 0.0; });
}

void add_into(RealImage& acc, const RealImage& x) {
  auto a = acc.values();
  auto b = x.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void check_shape(const ComplexImage& phase, std::size_t rows, std::size_t cols,
                 const std::string& what) {
  if (phase.rows() != rows || phase.cols() != cols)
    throw ConsistencyError(what + " phases do not match the scattering output grid");
}

}  // namespace

void CoefficientMask::validate(const ScatterOutput& s) const {
  if (mode == MaskMode::FullTensor) return;
  if (channel >= s.channel_count()) {
    throw DimensionError("mask channel " + std::to_string(channel) + " outside " +
                         std::to_string(s.channel_count()) + " channels");
  }
  if (mode == MaskMode::SingleValue && (site.row >= s.rows() || site.col >= s.cols())) {
    throw DimensionError("mask site (" + std::to_string(site.row) + ", " +
                         std::to_string(site.col) + ") outside the " + std::to_string(s.rows()) +
                         "x" + std::to_string(s.cols()) + " grid");
  }
}

ScatterOutput CoefficientMask::apply(const ScatterOutput& s) const {
  validate(s);
  ScatterOutput out = s;
  if (mode == MaskMode::FullTensor) return out;
  for (std::size_t k = 0; k < out.channels.size(); ++k) {
    if (k != channel) {
      out.channels[k].fill(0.0);
    } else if (mode == MaskMode::SingleValue) {
      const double keep = s.channels[k](site.row, site.col);
      out.channels[k].fill(0.0);
      out.channels[k](site.row, site.col) = keep;
    }
  }
  return out;
}

RealImage invert_lowpass(const RealImage& s, int stages) {
  if (stages < 0) throw DimensionError("cannot invert a negative number of lowpass stages");
  RealImage out = s;
  for (int k = 0; k < stages; ++k) out = lowpass_stage_adjoint(out);
  return out;
}

RealImage invert_lowpass(const RealImage& s, std::size_t target_rows, std::size_t target_cols) {
  if (s.empty()) throw DimensionError("cannot upsample an empty grid");
  const bool divisible = target_rows % s.rows() == 0 && target_cols % s.cols() == 0;
  const std::size_t ratio = divisible ? target_rows / s.rows() : 0;
  const bool power_of_two = ratio != 0 && (ratio & (ratio - 1)) == 0;
  if (!divisible || !power_of_two || target_cols / s.cols() != ratio) {
    throw DimensionError("target " + std::to_string(target_rows) + "x" +
                         std::to_string(target_cols) + " is not a power-of-two upsampling of " +
                         std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
  }
  int stages = 0;
  while ((std::size_t{1} << stages) < ratio) ++stages;
  return invert_lowpass(s, stages);
}

RealImage interpolate_lowpass(const RealImage& s, int stages) {
  RealImage out = invert_lowpass(s, stages);
  const double gain = std::ldexp(1.0, 2 * stages);
  for (double& v : out.values()) v *= gain;
  return out;
}

ComplexImage invert_modulus(const RealImage& u_hat, const ComplexImage& phases) {
  if (u_hat.rows() != phases.rows() || u_hat.cols() != phases.cols()) {
    throw DimensionError("magnitude " + std::to_string(u_hat.rows()) + "x" +
                         std::to_string(u_hat.cols()) + " and phase " +
                         std::to_string(phases.rows()) + "x" + std::to_string(phases.cols()) +
                         " shapes differ");
  }
  ComplexImage w(u_hat.rows(), u_hat.cols());
  auto u = u_hat.values();
  auto p = phases.values();
  auto out = w.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::abs(std::abs(p[i]) - 1.0) > 1e-6)
      throw ValidationError("phase at flat index " + std::to_string(i) + " has modulus " +
                            std::to_string(std::abs(p[i])) + ", expected 1");
    out[i] = u[i] * p[i];
  }
  return w;
}

PlanarImage descatter(const ScatterOutput& s, const PhaseStore& phases,
                      const CoefficientMask& mask, const ScatterConfig& config) {
  config.validate();
  const int J = config.J;
  const auto expected = build_channel_map(config, s.color_planes);
  if (expected != s.channel_map || s.channels.size() != expected.size())
    throw ConsistencyError("scattering output does not match the configuration's channel map");
  if (s.padded_rows != s.rows() << J || s.padded_cols != s.cols() << J)
    throw ConsistencyError("scattering grid does not match the padded image size and J");

  const ScatterOutput masked = mask.apply(s);
  const std::size_t planes = static_cast<std::size_t>(s.color_planes);
  const bool split = planes == 1 || config.color_mode == ColorMode::SplitLuminance;
  const std::size_t wavelet_planes = split ? 1 : planes;
  if (phases.planes.size() != wavelet_planes)
    throw ConsistencyError("phase store has " + std::to_string(phases.planes.size()) +
                           " planes, expected " + std::to_string(wavelet_planes));

  // Channel indices of each (plane, path) in canonical order.
  std::size_t next = planes;
  const Dtcwt transform;
  std::vector<RealImage> wavelet_images;
  std::vector<std::vector<std::array<RealImage, kOrientations>>> u1_hat(wavelet_planes);

  for (std::size_t wp = 0; wp < wavelet_planes; ++wp) {
    const auto& pp = phases.planes[wp];
    if (pp.order1.size() != static_cast<std::size_t>(J))
      throw ConsistencyError("order-1 phase levels do not match J");
    u1_hat[wp].resize(static_cast<std::size_t>(J));
    for (int j1 = 1; j1 <= J; ++j1) {
      for (int t1 = 0; t1 < kOrientations; ++t1) {
        check_shape(phases.order1(wp, j1, t1), s.padded_rows >> j1, s.padded_cols >> j1,
                    "order-1");
        u1_hat[wp][static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)] =
            interpolate_lowpass(masked.channels[next++], J - j1);
      }
    }
  }

  if (config.m >= 2) {
    for (std::size_t wp = 0; wp < wavelet_planes; ++wp) {
      if (phases.planes[wp].order2.size() != static_cast<std::size_t>(J))
        throw ConsistencyError("order-2 phase levels do not match J");
      for (int j1 = 1; j1 < J; ++j1) {
        for (int t1 = 0; t1 < kOrientations; ++t1) {
          const std::size_t rows = s.padded_rows >> j1;
          const std::size_t cols = s.padded_cols >> j1;
          ComplexPyramid w2 = ComplexPyramid::zeros(rows, cols, J - j1);
          bool any = false;
          for (int j2 = j1 + 1; j2 <= J; ++j2) {
            for (int t2 = 0; t2 < kOrientations; ++t2) {
              const auto& phase = phases.order2(wp, j1, t1, j2, t2);
              check_shape(phase, s.padded_rows >> j2, s.padded_cols >> j2, "order-2");
              const RealImage& coeffs = masked.channels[next++];
              if (all_zero(coeffs)) continue;
              any = true;
              w2.band(j2 - j1, t2) = invert_modulus(interpolate_lowpass(coeffs, J - j2), phase);
            }
          }
          if (any)
            add_into(u1_hat[wp][static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)],
                     transform.inverse(w2));
        }
      }
    }
  }
  if (next != masked.channels.size())
    throw ConsistencyError("channel bookkeeping mismatch while descattering");

  for (std::size_t wp = 0; wp < wavelet_planes; ++wp) {
    ComplexPyramid w1 = ComplexPyramid::zeros(s.padded_rows, s.padded_cols, J);
    bool any = false;
    for (int j1 = 1; j1 <= J; ++j1) {
      for (int t1 = 0; t1 < kOrientations; ++t1) {
        const auto& u = u1_hat[wp][static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)];
        if (all_zero(u)) continue;
        any = true;
        w1.band(j1, t1) = invert_modulus(u, phases.order1(wp, j1, t1));
      }
    }
    wavelet_images.push_back(any ? transform.inverse(w1)
                                 : RealImage(s.padded_rows, s.padded_cols));
  }

  PlanarImage out;
  for (std::size_t p = 0; p < planes; ++p) {
    RealImage plane = interpolate_lowpass(masked.channels[p], J);
    add_into(plane, wavelet_images[split ? 0 : p]);
    out.planes.push_back(std::move(plane));
  }
  return s.crop.apply(out);
}

}  // namespace scatterkit
