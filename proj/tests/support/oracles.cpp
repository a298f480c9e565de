#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

using scatterkit::Complex;

RealImage random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  RealImage out(rows, cols);
  for (double& v : out.values()) v = nd(rng);
  return out;
}

PlanarImage random_planar(std::size_t planes, std::size_t rows, std::size_t cols, std::uint64_t seed) {
  PlanarImage out;
  for (std::size_t p = 0; p < planes; ++p) out.planes.push_back(random_image(rows, cols, seed * 31 + p));
  return out;
}

RealImage smooth_image(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed) {
  const RealImage noise = random_image(rows, cols, seed);
  const long radius = static_cast<long>(std::ceil(4 * sigma));
  std::vector<double> g;
  for (long k = -radius; k <= radius; ++k) g.push_back(std::exp(-0.5 * k * k / (sigma * sigma)));
  const auto wrap = [](long i, long n) { return ((i % n) + n) % n; };
  RealImage tmp(rows, cols), out(rows, cols);
  const long R = static_cast<long>(rows), C = static_cast<long>(cols);
  for (long r = 0; r < R; ++r)
    for (long c = 0; c < C; ++c) {
      double s = 0;
      for (long k = -radius; k <= radius; ++k) s += g[k + radius] * noise(r, wrap(c + k, C));
      tmp(r, c) = s;
    }
  for (long r = 0; r < R; ++r)
    for (long c = 0; c < C; ++c) {
      double s = 0;
      for (long k = -radius; k <= radius; ++k) s += g[k + radius] * tmp(wrap(r + k, R), c);
      out(r, c) = s;
    }
  return out;
}

RealImage circular_shift(const RealImage& in, long dr, long dc) {
  const long R = static_cast<long>(in.rows()), C = static_cast<long>(in.cols());
  RealImage out(in.rows(), in.cols());
  for (long r = 0; r < R; ++r)
    for (long c = 0; c < C; ++c) out(r, c) = in((((r - dr) % R) + R) % R, (((c - dc) % C) + C) % C);
  return out;
}

namespace {

const std::vector<double>& db4_low() {
  static const std::vector<double> h = {0.23037781330885523, 0.7148465705525415,  0.6308807679295904,
                                        -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
                                        0.032883011666982945, -0.010597401784997278};
  return h;
}

// Periodic analysis of one line: lo[k] = sum h[n] x[2k + n], hi with the QMF.
void analyse(const std::vector<double>& x, std::vector<double>& lo, std::vector<double>& hi) {
  const auto& h = db4_low();
  const std::size_t n = x.size(), m = h.size();
  lo.assign(n / 2, 0.0);
  hi.assign(n / 2, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k)
    for (std::size_t i = 0; i < m; ++i) {
      const double v = x[(2 * k + i) % n];
      lo[k] += h[i] * v;
      hi[k] += ((i % 2) ? -1.0 : 1.0) * h[m - 1 - i] * v;
    }
}

}  // namespace

std::vector<double> dwt_db4(const RealImage& image, int levels) {
  std::vector<double> features;
  RealImage a = image;
  for (int level = 0; level < levels; ++level) {
    const std::size_t R = a.rows(), C = a.cols();
    RealImage L(R, C / 2), H(R, C / 2);
    std::vector<double> line, lo, hi;
    for (std::size_t r = 0; r < R; ++r) {
      line.assign(a.row(r).begin(), a.row(r).end());
      analyse(line, lo, hi);
      for (std::size_t c = 0; c < C / 2; ++c) {
        L(r, c) = lo[c];
        H(r, c) = hi[c];
      }
    }
    RealImage LL(R / 2, C / 2);
    for (const RealImage* src : {&L, &H}) {
      for (std::size_t c = 0; c < C / 2; ++c) {
        line.clear();
        for (std::size_t r = 0; r < R; ++r) line.push_back((*src)(r, c));
        analyse(line, lo, hi);
        for (std::size_t r = 0; r < R / 2; ++r) {
          if (src == &L)
            LL(r, c) = lo[r];
          else
            features.push_back(lo[r]);
          features.push_back(hi[r]);
        }
      }
    }
    a = LL;
  }
  features.insert(features.end(), a.values().begin(), a.values().end());
  return features;
}

RealImage direct_lowpass_stage(const RealImage& x, const std::vector<double>& h) {
  const auto refl = [](long i, long n) {
    const long p = 2 * n;
    long m = ((i % p) + p) % p;
    return m >= n ? p - 1 - m : m;
  };
  const long R = static_cast<long>(x.rows()), C = static_cast<long>(x.cols());
  const long taps = static_cast<long>(h.size());
  const long centre = taps / 2;
  RealImage y(x.rows() / 2, x.cols() / 2);
  for (long k = 0; k < R / 2; ++k)
    for (long l = 0; l < C / 2; ++l) {
      double s = 0;
      for (long n = 0; n < taps; ++n)
        for (long m = 0; m < taps; ++m)
          s += h[n] * h[m] * x(refl(2 * k + centre - n, R), refl(2 * l + centre - m, C));
      y(k, l) = s;
    }
  return y;
}

double dot(const RealImage& a, const RealImage& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

double norm(const RealImage& a) { return std::sqrt(dot(a, a)); }

double max_abs_diff(const RealImage& a, const RealImage& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

double ncc(const RealImage& a, const RealImage& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a.values()[i];
    mb += b.values()[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double s = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.values()[i] - ma, y = b.values()[i] - mb;
    s += x * y;
    sa += x * x;
    sb += y * y;
  }
  return s / std::sqrt(sa * sb);
}

namespace {

scatterkit::ComplexImage dft2(const RealImage& image) {
  const std::size_t R = image.rows(), C = image.cols();
  // Rows first, then columns.
  scatterkit::ComplexImage tmp(R, C), spec(R, C);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t u = 0; u < C; ++u) {
      Complex s;
      for (std::size_t c = 0; c < C; ++c) s += image(r, c) * std::polar(1.0, -2 * std::numbers::pi * u * c / C);
      tmp(r, u) = s;
    }
  for (std::size_t u = 0; u < C; ++u)
    for (std::size_t v = 0; v < R; ++v) {
      Complex s;
      for (std::size_t r = 0; r < R; ++r) s += tmp(r, u) * std::polar(1.0, -2 * std::numbers::pi * v * r / R);
      spec(v, u) = s;
    }
  return spec;
}

double signed_frequency(std::size_t k, std::size_t n) {
  return (k < n / 2 ? double(k) : double(k) - double(n)) / double(n);
}

}  // namespace

Frequency peak_frequency(const RealImage& image) {
  const std::size_t R = image.rows(), C = image.cols();
  const auto spec = dft2(image);
  Frequency best;
  double peak = -1;
  for (std::size_t v = 0; v < R; ++v)
    for (std::size_t u = 0; u < C; ++u) {
      const double fr = signed_frequency(v, R);
      const double fc = signed_frequency(u, C);
      if (fr < 0 || (fr == 0 && fc <= 0)) continue;
      const double m = std::abs(spec(v, u));
      if (m > peak) {
        peak = m;
        best = {fr, fc};
      }
    }
  return best;
}

Frequency band_center_frequency(int j, int theta, std::size_t size) {
  auto pyramid = scatterkit::ComplexPyramid::zeros(size, size, j);
  const std::size_t n = size >> j;
  pyramid.band(j, theta)(n / 2, n / 2) = 1.0;
  return peak_frequency(scatterkit::Dtcwt().inverse(pyramid));
}

RealImage grating(std::size_t rows, std::size_t cols, Frequency f, double phase) {
  RealImage out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(r, c) = std::cos(2 * std::numbers::pi * (f.fr * double(r) + f.fc * double(c)) + phase);
  return out;
}

double dominant_edge_angle(const RealImage& image) {
  // Structure tensor evaluated in the frequency domain, where the derivative
  // is exact; finite differences skew oblique frequencies towards 45 degrees.
  // A Hann window keeps border discontinuities from leaking onto the axes.
  const std::size_t R = image.rows(), C = image.cols();
  RealImage windowed(R, C);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c)
      windowed(r, c) = image(r, c) * std::pow(std::sin(std::numbers::pi * (r + 0.5) / R), 2) *
                       std::pow(std::sin(std::numbers::pi * (c + 0.5) / C), 2);
  const auto spec = dft2(windowed);
  double jxx = 0, jyy = 0, jxy = 0;
  for (std::size_t v = 0; v < R; ++v)
    for (std::size_t u = 0; u < C; ++u) {
      const double e = std::norm(spec(v, u));
      const double fx = signed_frequency(u, C);
      const double fy = -signed_frequency(v, R);  // y points up on screen
      jxx += e * fx * fx;
      jyy += e * fy * fy;
      jxy += e * fx * fy;
    }
  const double gradient = 0.5 * std::atan2(2 * jxy, jxx - jyy) * 180.0 / std::numbers::pi;
  double edge = gradient + 90.0;
  edge = std::fmod(edge, 180.0);
  if (edge < 0) edge += 180.0;
  return edge;
}

double angle_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

std::vector<std::vector<scatterkit::ActivationRecord>> brute_force_topk(
    const std::vector<PlanarImage>& corpus, const scatterkit::ScatterConfig& config, std::size_t k) {
  std::vector<std::vector<scatterkit::ActivationRecord>> all;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto s = scatterkit::scatter(corpus[i], config).output;
    if (all.empty()) all.resize(s.channel_count());
    for (std::size_t ch = 0; ch < s.channel_count(); ++ch) {
      scatterkit::ActivationRecord rec;
      rec.channel = ch;
      rec.image_index = i;
      rec.image_id = "img" + std::to_string(i);
      rec.score = -1;
      for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < s.cols(); ++c)
          if (std::abs(s.at(r, c, ch)) > rec.score) {
            rec.score = std::abs(s.at(r, c, ch));
            rec.site = {r, c};
          }
      all[ch].push_back(rec);
    }
  }
  for (auto& list : all) {
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    if (list.size() > k) list.resize(k);
  }
  return all;
}

}  // namespace oracle
