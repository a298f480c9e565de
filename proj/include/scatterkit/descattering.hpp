#pragma once

#include <cstddef>

#include "scatterkit/image.hpp"
#include "scatterkit/scattering.hpp"

namespace scatterkit {

enum class MaskMode {
  /// Keep only tensor[site, channel].
  SingleValue,
  /// Keep every site of one channel.
  FullChannel,
  /// Keep everything.
  FullTensor,
};

struct CoefficientMask {
  std::size_t channel = 0;
  Site site;
  MaskMode mode = MaskMode::FullTensor;

  static CoefficientMask single(std::size_t channel, Site site) {
    return {channel, site, MaskMode::SingleValue};
  }
  static CoefficientMask full_channel(std::size_t channel) {
    return {channel, {}, MaskMode::FullChannel};
  }
  static CoefficientMask full_tensor() { return {}; }

  /// Throws DimensionError when indices fall outside the tensor.
  void validate(const ScatterOutput& s) const;

  /// Copy of s with everything outside the mask set to zero.
  ScatterOutput apply(const ScatterOutput& s) const;
};

/// Transpose of lowpass_project: `stages` zero-insertion upsample + mirrored
/// lowpass steps, each doubling both dimensions.
RealImage invert_lowpass(const RealImage& s, int stages);

/// Same, with the target grid given by shape; it must be a power-of-two
/// upsampling of s.
RealImage invert_lowpass(const RealImage& s, std::size_t target_rows, std::size_t target_cols);

/// invert_lowpass rescaled by 4^stages so constants map to the same constant
/// (interpolation rather than a strict transpose). Used by descatter.
RealImage interpolate_lowpass(const RealImage& s, int stages);

/// Reinsert saved phases: W = U * e^{j theta}.
ComplexImage invert_modulus(const RealImage& u_hat, const ComplexImage& phases);

/// Back-project (masked) scattering coefficients to pixel space. Returns one
/// plane per input colour plane, cropped back to the unpadded input size;
/// luminance contributions are added to every colour plane.
PlanarImage descatter(const ScatterOutput& s, const PhaseStore& phases,
                      const CoefficientMask& mask, const ScatterConfig& config);

}  // namespace scatterkit
