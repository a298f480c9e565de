#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "scatterkit/image.hpp"

namespace scatterkit {

/// Number of complex orientations per DT-CWT scale.
inline constexpr int kOrientations = 6;

/// Nominal orientation of each band in degrees, in band-index order. The angle
/// is the direction of the edges a band responds to, measured counter-clockwise
/// from the +column axis as the image is displayed (row 0 at the top).
inline constexpr std::array<double, kOrientations> kBandAnglesDegrees = {15.0,  45.0,  75.0,
                                                                         105.0, 135.0, 165.0};

// Level-1 filters are linear phase with odd lengths; the q-shift filters for
// coarser levels are even length with approximate quarter-sample delays
// between the two trees (h0b is the reverse of h0a).
struct BiorthogonalFilters {
  std::vector<double> h0o, g0o, h1o, g1o;
};

struct QshiftFilters {
  std::vector<double> h0a, h0b, g0a, g0b, h1a, h1b, g1a, g1b;
};

class WaveletFilterSet {
 public:
  WaveletFilterSet(BiorthogonalFilters level1, QshiftFilters qshift);

  /// near_sym_b at level 1 and qshift_b at levels >= 2.
  static const WaveletFilterSet& standard();

  const BiorthogonalFilters& level1() const noexcept { return level1_; }
  const QshiftFilters& qshift() const noexcept { return qshift_; }

 private:
  BiorthogonalFilters level1_;
  QshiftFilters qshift_;
};

/// Wavelet-domain representation of one image.
///
/// bands[j-1][theta] holds the complex subband at scale j (1-based), sampled
/// on the 2^-j grid. The DT-CWT lowpass is carried by four trees; each tree
/// plane lives on the 2^-J grid, indexed by (row parity, col parity) of the
/// interleaved lowpass: 0 = (0,0), 1 = (0,1), 2 = (1,0), 3 = (1,1).
struct ComplexPyramid {
  std::array<RealImage, 4> lowpass;
  std::vector<std::array<ComplexImage, kOrientations>> bands;
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;

  int levels() const noexcept { return static_cast<int>(bands.size()); }

  ComplexImage& band(int scale, int orientation) { return bands.at(scale - 1).at(orientation); }
  const ComplexImage& band(int scale, int orientation) const {
    return bands.at(scale - 1).at(orientation);
  }

  /// All-zero pyramid for a source of the given shape.
  static ComplexPyramid zeros(std::size_t rows, std::size_t cols, int levels);

  /// Lowpass trees interleaved back onto the 2^-(J-1) grid.
  RealImage interleaved_lowpass() const;
  void set_interleaved_lowpass(const RealImage& interleaved);
};

/// Forward and inverse 2-D dual-tree complex wavelet transform.
class Dtcwt {
 public:
  explicit Dtcwt(const WaveletFilterSet& filters = WaveletFilterSet::standard())
      : filters_(&filters) {}

  /// Requires rows and cols divisible by 2^levels and levels >= 1.
  ComplexPyramid forward(const RealImage& image, int levels) const;

  /// Synthesis bank; accepts arbitrary (e.g. 1-sparse) pyramids.
  RealImage inverse(const ComplexPyramid& pyramid) const;

  const WaveletFilterSet& filters() const noexcept { return *filters_; }

 private:
  const WaveletFilterSet* filters_;
};

/// Symmetric padding applied before a transform; records how to undo it.
struct CropRecord {
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;

  bool empty() const noexcept { return top == 0 && bottom == 0 && left == 0 && right == 0; }

  RealImage apply(const RealImage& padded) const;
  PlanarImage apply(const PlanarImage& padded) const;

  friend bool operator==(const CropRecord&, const CropRecord&) = default;
};

struct PaddedImage {
  RealImage image;
  CropRecord crop;
};

/// Half-sample symmetric extension to the next multiple of 2^levels in each
/// dimension; the extra samples are split as evenly as possible with the
/// smaller half first.
PaddedImage pad_to_multiple(const RealImage& image, int levels);

/// Same padding applied to every plane.
PlanarImage pad_planes(const PlanarImage& image, int levels, CropRecord* crop);

namespace detail {

/// Index into [0, n) under half-sample symmetric extension; handles any
/// distance outside the range by repeated reflection.
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) noexcept;

// Column filtering primitives of the DT-CWT filter bank. Each operates on the
// columns of X (i.e. combines rows); row filtering is done by transposition.

/// Non-decimated filtering; same size output for odd-length filters.
RealImage colfilter(const RealImage& x, std::span<const double> h);

/// Two-tree decimating filter: ha on one tree, hb on the other; output rows
/// interleave the trees and number half the input rows. Rows must be a
/// multiple of 4.
RealImage coldfilt(const RealImage& x, std::span<const double> ha, std::span<const double> hb);

/// Two-tree interpolating filter, the synthesis counterpart of coldfilt.
RealImage colifilt(const RealImage& x, std::span<const double> ha, std::span<const double> hb);

/// Pairs the four samples of each 2x2 quad into two complex values.
std::array<ComplexImage, 2> q2c(const RealImage& y);

/// Inverse of q2c.
RealImage c2q(const ComplexImage& w0, const ComplexImage& w1);

}  // namespace detail

}  // namespace scatterkit
