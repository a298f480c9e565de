#pragma once

// Reference computations written independently of the library, used as
// test oracles.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "scatterkit/image.hpp"
#include "scatterkit/vizpipeline.hpp"

namespace oracle {

using scatterkit::PlanarImage;
using scatterkit::RealImage;

RealImage random_image(std::size_t rows, std::size_t cols, std::uint64_t seed);
PlanarImage random_planar(std::size_t planes, std::size_t rows, std::size_t cols, std::uint64_t seed);

/// White noise blurred by a circular Gaussian of the given sigma; periodic.
RealImage smooth_image(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed);

/// out(r, c) = in(r - dr, c - dc) with wrap-around.
RealImage circular_shift(const RealImage& in, long dr, long dc);

/// Periodic separable Daubechies-4 (8-tap) DWT; all subbands of `levels`
/// levels concatenated.
std::vector<double> dwt_db4(const RealImage& image, int levels);

/// One separable stage written as a direct double sum over the 2-D kernel
/// h(n) h(m) with half-sample symmetric extension.
RealImage direct_lowpass_stage(const RealImage& x, const std::vector<double>& h);

double dot(const RealImage& a, const RealImage& b);
double norm(const RealImage& a);
double max_abs_diff(const RealImage& a, const RealImage& b);
double ncc(const RealImage& a, const RealImage& b);

/// Magnitude spectrum via a separable DFT; returns the (fr, fc) in cycles per
/// pixel, fr, fc in [-0.5, 0.5), of the largest bin with fr * 1 + fc * eps > 0
/// (the half plane is fixed so that +f and -f are not both reported).
struct Frequency {
  double fr = 0.0, fc = 0.0;
};
Frequency peak_frequency(const RealImage& image);

/// Frequency at which band (j, theta) peaks: FFT of the pixel pattern
/// synthesised from one unit coefficient.
Frequency band_center_frequency(int j, int theta, std::size_t size = 128);

/// cos(2 pi (fr r + fc c) + phase).
RealImage grating(std::size_t rows, std::size_t cols, Frequency f, double phase = 0.0);

/// Edge direction in degrees, counter-clockwise from +col with rows drawn
/// downwards, from the energy-weighted structure tensor; in [0, 180).
double dominant_edge_angle(const RealImage& image);

/// Smallest absolute difference between two orientations modulo 180.
double angle_distance(double a, double b);

/// Score every image, sort by (score desc, index asc), take k.
std::vector<std::vector<scatterkit::ActivationRecord>> brute_force_topk(
    const std::vector<PlanarImage>& corpus, const scatterkit::ScatterConfig& config, std::size_t k);

}  // namespace oracle
