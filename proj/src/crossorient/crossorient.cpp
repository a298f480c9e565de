#include <cmath>
#include <numbers>
#include <string>

#include "scatterkit/crossorient.hpp"
#include "scatterkit/errors.hpp"

namespace scatterkit {
namespace {

constexpr int kN = kExtendedOrientations;

int wrap(int t) { return ((t % kN) + kN) % kN; }

void check_shape(std::size_t h, std::size_t w) {
  const auto ok = [](std::size_t n) { return n == 1 || n == 3; };
  if (!ok(h) || !ok(w))
    throw ValidationError("cross-orientation kernels must be 1 or 3 wide spatially, got " +
                          std::to_string(h) + "x" + std::to_string(w));
}

}  // namespace

CrossOrientFilter::CrossOrientFilter(std::size_t h, std::size_t w, std::string name)
    : h_(h), w_(w), kernel_(h * w * kN), name_(std::move(name)) {
  check_shape(h, w);
}

CrossOrientFilter::CrossOrientFilter(std::span<const Complex> orientation, std::string name)
    : CrossOrientFilter(1, 1, std::move(name)) {
  if (orientation.size() != static_cast<std::size_t>(kN))
    throw ValidationError("orientation axis must have 12 coefficients, got " +
                          std::to_string(orientation.size()));
  std::copy(orientation.begin(), orientation.end(), kernel_.begin());
}

Complex& CrossOrientFilter::at(std::size_t a, std::size_t b, int theta) {
  return kernel_.at((a * w_ + b) * kN + static_cast<std::size_t>(theta));
}

const Complex& CrossOrientFilter::at(std::size_t a, std::size_t b, int theta) const {
  return kernel_.at((a * w_ + b) * kN + static_cast<std::size_t>(theta));
}

CrossOrientFilter CrossOrientFilter::scaled(Complex factor) const {
  CrossOrientFilter out = *this;
  for (auto& v : out.kernel_) v *= factor;
  return out;
}

ExtendedBands extend_orientations(std::span<const ComplexImage> bands) {
  if (bands.size() != static_cast<std::size_t>(kOrientations))
    throw ValidationError("need exactly 6 orientation bands, got " + std::to_string(bands.size()));
  ExtendedBands out;
  for (int t = 0; t < kOrientations; ++t) {
    const auto& band = bands[static_cast<std::size_t>(t)];
    if (!band.same_shape(bands[0])) throw ValidationError("orientation bands differ in shape");
    out.bands12[static_cast<std::size_t>(t)] = band;
    ComplexImage conj(band.rows(), band.cols());
    for (std::size_t i = 0; i < band.size(); ++i) conj.values()[i] = std::conj(band.values()[i]);
    out.bands12[static_cast<std::size_t>(t + kOrientations)] = std::move(conj);
  }
  return out;
}

ComplexImage apply_cross_filter(const ExtendedBands& w, const CrossOrientFilter& f) {
  if (f.values().size() != f.height() * f.width() * kN || f.values().empty())
    throw ValidationError("cross-orientation kernel must have an orientation axis of 12");
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  for (const auto& band : w.bands12)
    if (band.rows() != rows || band.cols() != cols)
      throw ValidationError("extended bands differ in shape");

  ComplexImage v(rows, cols);
  const auto R = static_cast<std::ptrdiff_t>(rows);
  const auto C = static_cast<std::ptrdiff_t>(cols);
  const auto oh = static_cast<std::ptrdiff_t>(f.height() / 2);
  const auto ow = static_cast<std::ptrdiff_t>(f.width() / 2);
  for (std::size_t a = 0; a < f.height(); ++a) {
    for (std::size_t b = 0; b < f.width(); ++b) {
      for (int t = 0; t < kN; ++t) {
        const Complex k = f.at(a, b, t);
        if (k == Complex(0.0, 0.0)) continue;
        const auto& band = w.bands12[static_cast<std::size_t>(t)];
        for (std::ptrdiff_t r = 0; r < R; ++r) {
          const auto sr = detail::reflect_index(r + static_cast<std::ptrdiff_t>(a) - oh, R);
          for (std::ptrdiff_t c = 0; c < C; ++c) {
            const auto sc = detail::reflect_index(c + static_cast<std::ptrdiff_t>(b) - ow, C);
            v(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) +=
                band(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc)) * k;
          }
        }
      }
    }
  }
  return v;
}

RealImage modulus_v(const ComplexImage& v) {
  RealImage u(v.rows(), v.cols());
  for (std::size_t i = 0; i < v.size(); ++i) u.values()[i] = std::abs(v.values()[i]);
  return u;
}

CrossOrientFilter roll_filter(const CrossOrientFilter& f, int steps) {
  CrossOrientFilter out(f.height(), f.width(), f.name());
  for (std::size_t a = 0; a < f.height(); ++a)
    for (std::size_t b = 0; b < f.width(); ++b)
      for (int t = 0; t < kN; ++t) out.at(a, b, wrap(t + steps)) = f.at(a, b, t);
  return out;
}

std::vector<CrossOrientFilter> make_rototranslation_bank(int K) {
  if (K < 1 || K > kOrientations)
    throw ParameterError("rototranslation bank size must be in 1..6, got " + std::to_string(K));
  constexpr double sigma = 2.0;
  std::array<double, kN> window{};
  for (int t = 0; t < kN; ++t) {
    for (int n = -3; n <= 3; ++n) {
      const double d = t - n * kN;
      window[static_cast<std::size_t>(t)] += std::exp(-d * d / (2 * sigma * sigma));
    }
  }

  using Vec = std::array<Complex, kN>;
  const auto inner = [](const Vec& a, const Vec& b) {
    Complex s;
    for (int t = 0; t < kN; ++t) s += std::conj(a[static_cast<std::size_t>(t)]) * b[static_cast<std::size_t>(t)];
    return s;
  };
  // Orthonormal span of the constant vector and every accepted filter; the
  // k >= 1 filters are projected off it, which keeps them zero mean.
  std::vector<Vec> span_basis;
  const auto project_off = [&](Vec& f) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : span_basis) {
        const Complex p = inner(e, f);
        for (int t = 0; t < kN; ++t) f[static_cast<std::size_t>(t)] -= p * e[static_cast<std::size_t>(t)];
      }
  };
  const auto normalized = [&](Vec f) {
    const double norm = std::sqrt(inner(f, f).real());
    for (auto& v : f) v /= norm;
    return f;
  };
  Vec ones;
  ones.fill(Complex(1.0 / std::sqrt(static_cast<double>(kN)), 0.0));
  span_basis.push_back(ones);

  std::vector<CrossOrientFilter> bank;
  for (int k = 0; k < K; ++k) {
    Vec f{};
    for (int t = 0; t < kN; ++t) {
      f[static_cast<std::size_t>(t)] =
          window[static_cast<std::size_t>(t)] *
          std::polar(1.0, 2.0 * std::numbers::pi * k * t / kN);
    }
    if (k == 0) {
      f = normalized(f);
      Vec rest = f;
      project_off(rest);
      span_basis.push_back(normalized(rest));
    } else {
      project_off(f);
      f = normalized(f);
      span_basis.push_back(f);
    }
    bank.emplace_back(std::span<const Complex>(f), "rototranslation_k" + std::to_string(k));
  }
  return bank;
}

RealImage reconstruct_filter_shape(const CrossOrientFilter& f, VPart part, int scale,
                                   std::size_t rows, std::size_t cols) {
  if (scale < 1) throw ParameterError("scale must be >= 1, got " + std::to_string(scale));
  ComplexPyramid pyramid = ComplexPyramid::zeros(rows, cols, scale);
  const std::size_t br = rows >> scale;
  const std::size_t bc = cols >> scale;
  const std::size_t cr = br / 2;
  const std::size_t cc = bc / 2;
  const Complex v = part == VPart::Real ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
  const auto oh = static_cast<std::ptrdiff_t>(f.height() / 2);
  const auto ow = static_cast<std::ptrdiff_t>(f.width() / 2);

  for (std::size_t a = 0; a < f.height(); ++a) {
    for (std::size_t b = 0; b < f.width(); ++b) {
      const auto r = detail::reflect_index(static_cast<std::ptrdiff_t>(cr + a) - oh,
                                           static_cast<std::ptrdiff_t>(br));
      const auto c = detail::reflect_index(static_cast<std::ptrdiff_t>(cc + b) - ow,
                                           static_cast<std::ptrdiff_t>(bc));
      for (int t = 0; t < kN; ++t) {
        // Adjoint of W12 -> V is v * conj(F); the conjugate half folds back
        // onto its native band through one more conjugation.
        const Complex w12 = v * std::conj(f.at(a, b, t));
        const Complex native = t < kOrientations ? w12 : std::conj(w12);
        pyramid.band(scale, t % kOrientations)(static_cast<std::size_t>(r),
                                               static_cast<std::size_t>(c)) += native;
      }
    }
  }
  return Dtcwt().inverse(pyramid);
}

double normalized_dot(const RealImage& a, const RealImage& b) {
  if (!a.same_shape(b)) throw DimensionError("normalized_dot: shapes differ");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a.values()[i] * b.values()[i];
    aa += a.values()[i] * a.values()[i];
    bb += b.values()[i] * b.values()[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

CrossOrientFilter corner_filter() {
  const Complex j(0.0, 1.0);
  const std::array<Complex, kN> f = {1.0, j, j, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  return CrossOrientFilter(std::span<const Complex>(f), "corner");
}

std::vector<CrossOrientFilter> onehot_gallery() {
  std::vector<CrossOrientFilter> out;
  for (int t = 0; t < kOrientations; ++t) {
    std::array<Complex, kN> f{};
    f[static_cast<std::size_t>(t)] = 1.0;
    out.emplace_back(std::span<const Complex>(f), "onehot_" + std::to_string(t));
  }
  return out;
}

std::vector<CrossOrientFilter> corner_gallery() {
  std::vector<CrossOrientFilter> out;
  const auto base = corner_filter();
  for (int s = 0; s < kOrientations; ++s) {
    auto f = roll_filter(base, s);
    f.set_name("corner_roll" + std::to_string(s));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace scatterkit
