#include <string>

#include "scatterkit/dtcwt.hpp"
#include "scatterkit/errors.hpp"

namespace scatterkit {
namespace {

using detail::c2q;
using detail::coldfilt;
using detail::colfilter;
using detail::colifilt;
using detail::q2c;

RealImage add(RealImage a, const RealImage& b) {
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += bv[i];
  return a;
}

void check_divisible(std::size_t rows, std::size_t cols, int levels) {
  if (levels < 1) throw ParameterError("DT-CWT levels must be >= 1, got " + std::to_string(levels));
  const std::size_t multiple = std::size_t{1} << levels;
  if (rows == 0 || cols == 0 || rows % multiple != 0 || cols % multiple != 0) {
    throw DimensionError("image " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " must have both dimensions divisible by " + std::to_string(multiple) +
                         " for " + std::to_string(levels) + " levels; pad first");
  }
}

// The six bands of one level from the three real quad images.
void store_bands(std::array<ComplexImage, kOrientations>& out, const RealImage& horizontal,
                 const RealImage& vertical, const RealImage& diagonal) {
  auto h = q2c(horizontal);
  auto v = q2c(vertical);
  auto d = q2c(diagonal);
  out[0] = std::move(h[0]);
  out[5] = std::move(h[1]);
  out[2] = std::move(v[0]);
  out[3] = std::move(v[1]);
  out[1] = std::move(d[0]);
  out[4] = std::move(d[1]);
}

}  // namespace

ComplexPyramid ComplexPyramid::zeros(std::size_t rows, std::size_t cols, int levels) {
  check_divisible(rows, cols, levels);
  ComplexPyramid p;
  p.source_rows = rows;
  p.source_cols = cols;
  p.bands.resize(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) {
    for (auto& band : p.bands[static_cast<std::size_t>(j - 1)])
      band = ComplexImage(rows >> j, cols >> j);
  }
  for (auto& tree : p.lowpass) tree = RealImage(rows >> levels, cols >> levels);
  return p;
}

RealImage ComplexPyramid::interleaved_lowpass() const {
  const std::size_t r = lowpass[0].rows();
  const std::size_t c = lowpass[0].cols();
  RealImage out(2 * r, 2 * c);
  for (std::size_t q = 0; q < 4; ++q) {
    if (lowpass[q].rows() != r || lowpass[q].cols() != c)
      throw DimensionError("lowpass tree planes differ in shape");
    const std::size_t dr = q / 2;
    const std::size_t dc = q % 2;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < c; ++k) out(2 * i + dr, 2 * k + dc) = lowpass[q](i, k);
  }
  return out;
}

void ComplexPyramid::set_interleaved_lowpass(const RealImage& interleaved) {
  if (interleaved.rows() % 2 != 0 || interleaved.cols() % 2 != 0)
    throw DimensionError("interleaved lowpass must have even dimensions");
  const std::size_t r = interleaved.rows() / 2;
  const std::size_t c = interleaved.cols() / 2;
  for (std::size_t q = 0; q < 4; ++q) {
    lowpass[q] = RealImage(r, c);
    const std::size_t dr = q / 2;
    const std::size_t dc = q % 2;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < c; ++k) lowpass[q](i, k) = interleaved(2 * i + dr, 2 * k + dc);
  }
}

ComplexPyramid Dtcwt::forward(const RealImage& image, int levels) const {
  check_divisible(image.rows(), image.cols(), levels);
  const auto& b = filters_->level1();
  const auto& q = filters_->qshift();

  ComplexPyramid out;
  out.source_rows = image.rows();
  out.source_cols = image.cols();
  out.bands.resize(static_cast<std::size_t>(levels));

  // Level 1 is non-decimated; the quad pairing in q2c performs the 2x2
  // decimation of the bandpass outputs.
  RealImage lo = transpose(colfilter(image, b.h0o));
  RealImage hi = transpose(colfilter(image, b.h1o));
  RealImage lolo = transpose(colfilter(lo, b.h0o));
  store_bands(out.bands[0], transpose(colfilter(hi, b.h0o)), transpose(colfilter(lo, b.h1o)),
              transpose(colfilter(hi, b.h1o)));

  for (int level = 2; level <= levels; ++level) {
    lo = transpose(coldfilt(lolo, q.h0b, q.h0a));
    hi = transpose(coldfilt(lolo, q.h1b, q.h1a));
    lolo = transpose(coldfilt(lo, q.h0b, q.h0a));
    store_bands(out.bands[static_cast<std::size_t>(level - 1)],
                transpose(coldfilt(hi, q.h0b, q.h0a)), transpose(coldfilt(lo, q.h1b, q.h1a)),
                transpose(coldfilt(hi, q.h1b, q.h1a)));
  }

  out.set_interleaved_lowpass(lolo);
  return out;
}

RealImage Dtcwt::inverse(const ComplexPyramid& pyramid) const {
  const int levels = pyramid.levels();
  check_divisible(pyramid.source_rows, pyramid.source_cols, levels);
  for (int j = 1; j <= levels; ++j) {
    for (int t = 0; t < kOrientations; ++t) {
      const auto& band = pyramid.band(j, t);
      if (band.rows() != (pyramid.source_rows >> j) || band.cols() != (pyramid.source_cols >> j)) {
        throw DimensionError("band (scale " + std::to_string(j) + ", orientation " +
                             std::to_string(t) + ") has shape " + std::to_string(band.rows()) +
                             "x" + std::to_string(band.cols()) + ", expected " +
                             std::to_string(pyramid.source_rows >> j) + "x" +
                             std::to_string(pyramid.source_cols >> j));
      }
    }
  }
  for (const auto& tree : pyramid.lowpass) {
    if (tree.rows() != (pyramid.source_rows >> levels) ||
        tree.cols() != (pyramid.source_cols >> levels))
      throw DimensionError("lowpass tree shape inconsistent with source shape and levels");
  }

  const auto& b = filters_->level1();
  const auto& q = filters_->qshift();
  RealImage z = pyramid.interleaved_lowpass();

  for (int level = levels; level >= 2; --level) {
    const auto& w = pyramid.bands[static_cast<std::size_t>(level - 1)];
    const RealImage lh = c2q(w[0], w[5]);
    const RealImage hl = c2q(w[2], w[3]);
    const RealImage hh = c2q(w[1], w[4]);
    const RealImage y1 = add(colifilt(z, q.g0b, q.g0a), colifilt(lh, q.g1b, q.g1a));
    const RealImage y2 = add(colifilt(hl, q.g0b, q.g0a), colifilt(hh, q.g1b, q.g1a));
    z = transpose(add(colifilt(transpose(y1), q.g0b, q.g0a), colifilt(transpose(y2), q.g1b, q.g1a)));
  }

  const auto& w = pyramid.bands[0];
  const RealImage lh = c2q(w[0], w[5]);
  const RealImage hl = c2q(w[2], w[3]);
  const RealImage hh = c2q(w[1], w[4]);
  const RealImage y1 = add(colfilter(z, b.g0o), colfilter(lh, b.g1o));
  const RealImage y2 = add(colfilter(hl, b.g0o), colfilter(hh, b.g1o));
  return transpose(add(colfilter(transpose(y1), b.g0o), colfilter(transpose(y2), b.g1o)));
}

RealImage CropRecord::apply(const RealImage& padded) const {
  if (top + bottom > padded.rows() || left + right > padded.cols())
    throw DimensionError("crop record larger than the padded image");
  RealImage out(padded.rows() - top - bottom, padded.cols() - left - right);
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = padded(r + top, c + left);
  return out;
}

PlanarImage CropRecord::apply(const PlanarImage& padded) const {
  PlanarImage out;
  for (const auto& plane : padded.planes) out.planes.push_back(apply(plane));
  return out;
}

PaddedImage pad_to_multiple(const RealImage& image, int levels) {
  if (levels < 1) throw ParameterError("padding levels must be >= 1");
  if (image.empty()) throw DimensionError("cannot pad an empty image");
  const std::size_t multiple = std::size_t{1} << levels;
  const auto target = [&](std::size_t n) { return (n + multiple - 1) / multiple * multiple; };
  const std::size_t rows = target(image.rows());
  const std::size_t cols = target(image.cols());

  PaddedImage out;
  out.crop.top = (rows - image.rows()) / 2;
  out.crop.bottom = rows - image.rows() - out.crop.top;
  out.crop.left = (cols - image.cols()) / 2;
  out.crop.right = cols - image.cols() - out.crop.left;
  if (out.crop.empty()) {
    out.image = image;
    return out;
  }
  out.image = RealImage(rows, cols);
  const auto R = static_cast<std::ptrdiff_t>(image.rows());
  const auto C = static_cast<std::ptrdiff_t>(image.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    const auto sr = detail::reflect_index(static_cast<std::ptrdiff_t>(r) -
                                              static_cast<std::ptrdiff_t>(out.crop.top), R);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto sc = detail::reflect_index(static_cast<std::ptrdiff_t>(c) -
                                                static_cast<std::ptrdiff_t>(out.crop.left), C);
      out.image(r, c) = image(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc));
    }
  }
  return out;
}

PlanarImage pad_planes(const PlanarImage& image, int levels, CropRecord* crop) {
  PlanarImage out;
  CropRecord record;
  for (const auto& plane : image.planes) {
    auto padded = pad_to_multiple(plane, levels);
    record = padded.crop;
    out.planes.push_back(std::move(padded.image));
  }
  if (crop) *crop = record;
  return out;
}

}  // namespace scatterkit
