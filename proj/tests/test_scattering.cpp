#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "oracles.hpp"
#include "scatterkit/errors.hpp"
#include "scatterkit/scattering.hpp"

using namespace scatterkit;

namespace {

PlanarImage rgb(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  return oracle::random_planar(3, rows, cols, seed);
}

std::vector<double> averaging_taps() {
  const auto h = averaging_filter();
  return {h.begin(), h.end()};
}

double relative_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(ChannelMap, DefaultRgbHas243Channels) {
  const ScatterConfig config;
  const auto map = build_channel_map(config, 3);
  ASSERT_EQ(map.size(), 243u);
  EXPECT_EQ(channel_count(config, 3), 243u);
  int counts[3] = {0, 0, 0};
  for (const auto& d : map) ++counts[d.order];
  EXPECT_EQ(counts[0], 3);
  EXPECT_EQ(counts[1], 24);
  EXPECT_EQ(counts[2], 216);
}

TEST(ChannelMap, OrderingAndStrictScaleIncrease) {
  const auto map = build_channel_map(ScatterConfig{}, 3);
  for (int p = 0; p < 3; ++p) EXPECT_EQ(map[static_cast<std::size_t>(p)], (ChannelDescriptor{0, p}));
  EXPECT_EQ(map[3], (ChannelDescriptor{1, kLumaPlane, 1, 0}));
  EXPECT_EQ(map[26], (ChannelDescriptor{1, kLumaPlane, 4, 5}));
  EXPECT_EQ(map[27], (ChannelDescriptor{2, kLumaPlane, 1, 0, 2, 0}));
  for (std::size_t i = 27; i < map.size(); ++i) {
    EXPECT_GT(map[i].j2, map[i].j1);
    if (i > 27) {
      const auto& a = map[i - 1];
      const auto& b = map[i];
      EXPECT_LT(std::tie(a.j1, a.theta1, a.j2, a.theta2), std::tie(b.j1, b.theta1, b.j2, b.theta2));
    }
  }
}

TEST(ChannelMap, CountFormulaAcrossConfigurations) {
  for (int J = 1; J <= 5; ++J)
    for (int m = 1; m <= 2; ++m) {
      ScatterConfig c;
      c.J = J;
      c.m = m;
      const std::size_t L = 6;
      const std::size_t split = 3 + L * J + (m == 2 ? L * L * J * (J - 1) / 2 : 0);
      EXPECT_EQ(channel_count(c, 3), split);
      EXPECT_EQ(channel_count(c, 1), split - 2);
      c.color_mode = ColorMode::PerChannel;
      EXPECT_EQ(channel_count(c, 3), 3 + 3 * (split - 3));
    }
}

TEST(ChannelMap, LabelsAreReadable) {
  EXPECT_EQ((ChannelDescriptor{0, 2}).label(), "S0 plane2");
  EXPECT_EQ((ChannelDescriptor{2, kLumaPlane, 1, 0, 3, 4}).label(), "S2 luma j1=1 theta1=15 j2=3 theta2=135");
}

TEST(Config, Validation) {
  ScatterConfig c;
  EXPECT_NO_THROW(c.validate());
  c.m = 3;
  EXPECT_THROW(c.validate(), ParameterError);
  c.m = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.J = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_EQ(parse_color_mode("per-channel"), ColorMode::PerChannel);
  EXPECT_EQ(to_string(ColorMode::SplitLuminance), "split-luminance");
  EXPECT_THROW(parse_color_mode("rgb"), ParameterError);
}

TEST(Scatter, DefaultShape) {
  const auto res = scatter(rgb(64, 64, 1), ScatterConfig{});
  const auto& out = res.output;
  EXPECT_EQ(out.channel_count(), 243u);
  EXPECT_EQ(out.rows(), 4u);
  EXPECT_EQ(out.cols(), 4u);
  EXPECT_EQ(out.channel_map, build_channel_map(ScatterConfig{}, 3));
  EXPECT_TRUE(out.crop.empty());
  const auto flat = out.interleaved();
  ASSERT_EQ(flat.size(), 4u * 4u * 243u);
  EXPECT_EQ(flat[(1 * 4 + 2) * 243 + 100], out.at(1, 2, 100));
}

TEST(Scatter, ShapeContractForOtherSizes) {
  for (auto [rows, cols, J] : {std::tuple{32, 64, 3}, {48, 16, 4}, {40, 24, 2}, {16, 16, 1}}) {
    ScatterConfig c;
    c.J = J;
    const auto out = scatter(rgb(rows, cols, 2), c).output;
    EXPECT_EQ(out.rows(), static_cast<std::size_t>(rows >> J));
    EXPECT_EQ(out.cols(), static_cast<std::size_t>(cols >> J));
    EXPECT_EQ(out.channel_count(), channel_count(c, 3));
  }
}

TEST(Scatter, PadsAndRecordsCrop) {
  const auto out = scatter(rgb(60, 61, 3), ScatterConfig{}).output;
  EXPECT_EQ(out.padded_rows, 64u);
  EXPECT_EQ(out.padded_cols, 64u);
  EXPECT_EQ(out.crop, (CropRecord{2, 2, 1, 2}));
  EXPECT_EQ(out.rows(), 4u);
}

TEST(Scatter, ZeroImageGivesZeroTensorAndUnitPhases) {
  const auto res = scatter(PlanarImage(3, 64, 64), ScatterConfig{});
  for (const auto& ch : res.output.channels)
    for (double v : ch.values()) EXPECT_EQ(v, 0.0);
  const auto& p = res.phases.planes.at(0);
  for (const auto& level : p.order1)
    for (const auto& band : level)
      for (auto v : band.values()) EXPECT_EQ(v, Complex(1.0, 0.0));
  for (const auto& by_theta : p.order2)
    for (const auto& inner : by_theta)
      for (const auto& set : inner)
        for (const auto& band : set)
          for (auto v : band.values()) EXPECT_EQ(v, Complex(1.0, 0.0));
}

TEST(Scatter, HigherOrdersAreNonNegativeAndPhasesUnitModulus) {
  const auto res = scatter(rgb(64, 64, 4), ScatterConfig{});
  for (std::size_t k = 3; k < res.output.channel_count(); ++k)
    for (double v : res.output.channels[k].values()) EXPECT_GE(v, 0.0);
  for (int j = 1; j <= 4; ++j)
    for (int t = 0; t < 6; ++t)
      for (auto v : res.phases.order1(0, j, t).values()) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
  for (auto v : res.phases.order2(0, 1, 3, 4, 2).values()) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
  EXPECT_EQ(res.phases.order1(0, 2, 0).rows(), 16u);
  EXPECT_EQ(res.phases.order2(0, 1, 0, 3, 0).rows(), 8u);
}

TEST(Scatter, ChannelsMatchTheirDefinition) {
  // Recompute S0, an S1 and an S2 channel by hand from the primitives.
  const auto img = rgb(64, 64, 5);
  const ScatterConfig config;
  const auto out = scatter(img, config).output;
  const auto luma = luminance_split(img).luma;
  const Dtcwt t;

  EXPECT_LT(oracle::max_abs_diff(out.channels[1], lowpass_project(img.planes[1], 0, 4)), 1e-14);

  const auto w1 = t.forward(luma, 4);
  RealImage u1(16, 16);
  for (std::size_t i = 0; i < u1.size(); ++i) u1.values()[i] = std::abs(w1.band(2, 3).values()[i]);
  const auto& map = out.channel_map;
  const auto find = [&](ChannelDescriptor d) {
    return static_cast<std::size_t>(std::find(map.begin(), map.end(), d) - map.begin());
  };
  EXPECT_LT(oracle::max_abs_diff(out.channels[find({1, kLumaPlane, 2, 3})], lowpass_project(u1, 2, 4)), 1e-12);

  const auto w2 = t.forward(u1, 2);
  RealImage u2(4, 4);
  for (std::size_t i = 0; i < u2.size(); ++i) u2.values()[i] = std::abs(w2.band(2, 5).values()[i]);
  EXPECT_LT(oracle::max_abs_diff(out.channels[find({2, kLumaPlane, 2, 3, 4, 5})], u2), 1e-12);
}

TEST(Scatter, PhaseTimesModulusReproducesBands) {
  const auto img = PlanarImage({oracle::random_image(32, 32, 6)});
  ScatterConfig c;
  c.J = 3;
  const auto res = scatter(img, c);
  const auto w = Dtcwt().forward(img.planes[0], 3);
  for (int j = 1; j <= 3; ++j)
    for (int th = 0; th < 6; ++th) {
      const auto& band = w.band(j, th);
      const auto& ph = res.phases.order1(0, j, th);
      for (std::size_t i = 0; i < band.size(); ++i)
        EXPECT_LT(std::abs(std::abs(band.values()[i]) * ph.values()[i] - band.values()[i]), 1e-12);
    }
}

TEST(Scatter, GrayscaleAndPerChannelModes) {
  const auto gray = scatter(PlanarImage({oracle::random_image(32, 32, 7)}), ScatterConfig{}).output;
  EXPECT_EQ(gray.channel_count(), 1u + 24u + 216u);
  EXPECT_EQ(gray.channel_map[1].plane, 0);

  ScatterConfig c;
  c.color_mode = ColorMode::PerChannel;
  c.J = 2;
  const auto img = rgb(32, 32, 8);
  const auto res = scatter(img, c);
  EXPECT_EQ(res.output.channel_count(), channel_count(c, 3));
  EXPECT_EQ(res.phases.planes.size(), 3u);
  // Green-plane order-1 channels equal a grayscale run on the green plane.
  const auto g = scatter(PlanarImage({img.planes[1]}), c).output;
  const auto& map = res.output.channel_map;
  for (std::size_t k = 0; k < map.size(); ++k) {
    if (map[k].order != 1 || map[k].plane != 1) continue;
    const auto it = std::find(g.channel_map.begin(), g.channel_map.end(),
                              ChannelDescriptor{1, 0, map[k].j1, map[k].theta1});
    EXPECT_EQ(res.output.channels[k], g.channels[static_cast<std::size_t>(it - g.channel_map.begin())]);
  }
}

TEST(Scatter, GrayRgbMatchesGrayscaleInHigherOrders) {
  const auto plane = oracle::random_image(32, 32, 9);
  const auto grey3 = scatter(PlanarImage({plane, plane, plane}), ScatterConfig{}).output;
  const auto grey1 = scatter(PlanarImage({plane}), ScatterConfig{}).output;
  for (std::size_t k = 1; k < grey1.channel_count(); ++k)
    EXPECT_LT(oracle::max_abs_diff(grey3.channels[k + 2], grey1.channels[k]), 1e-12);
}

TEST(Scatter, Errors) {
  auto img = rgb(32, 32, 10);
  img.planes[2](3, 4) = std::nan("");
  EXPECT_THROW(scatter(img, ScatterConfig{}), ValidationError);
  img.planes[2](3, 4) = INFINITY;
  EXPECT_THROW(scatter(img, ScatterConfig{}), ValidationError);
  ScatterConfig c;
  c.m = 3;
  EXPECT_THROW(scatter(rgb(32, 32, 11), c), ParameterError);
  EXPECT_THROW(scatter(oracle::random_planar(2, 32, 32, 12), ScatterConfig{}), ValidationError);
  EXPECT_THROW(scatter(PlanarImage(3, 0, 0), ScatterConfig{}), DimensionError);
}

TEST(Scatter, DeterministicAndThreadSafe) {
  const auto img = rgb(64, 64, 13);
  const auto a = scatter(img, ScatterConfig{}).output.interleaved();
  std::vector<std::vector<double>> outs(4);
  std::vector<std::thread> threads;
  for (auto& o : outs) threads.emplace_back([&] { o = scatter(img, ScatterConfig{}).output.interleaved(); });
  for (auto& t : threads) t.join();
  for (const auto& o : outs) EXPECT_EQ(o, a);
}

TEST(Scatter, TwoPixelTranslateIsCloserThanFirstScaleDwt) {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const auto x = oracle::smooth_image(64, 64, 2.0, seed);
    const auto y = oracle::circular_shift(x, 2, 0);
    const auto sx = scatter(PlanarImage({x}), ScatterConfig{}).output.interleaved();
    const auto sy = scatter(PlanarImage({y}), ScatterConfig{}).output.interleaved();
    const auto dx = oracle::dwt_db4(x, 1), dy = oracle::dwt_db4(y, 1);
    const std::vector<double> hx(dx.begin(), dx.begin() + 3 * 32 * 32), hy(dy.begin(), dy.begin() + 3 * 32 * 32);
    EXPECT_LT(relative_distance(sx, sy), relative_distance(hx, hy)) << seed;
  }
}

TEST(Modulus, IsNonExpansivePerBand) {
  const Dtcwt t;
  for (std::uint64_t seed = 30; seed < 35; ++seed) {
    const auto a = t.forward(oracle::random_image(32, 32, seed), 3);
    const auto b = t.forward(oracle::random_image(32, 32, seed + 100), 3);
    for (int j = 1; j <= 3; ++j)
      for (int th = 0; th < 6; ++th) {
        double du = 0, dw = 0;
        for (std::size_t i = 0; i < a.band(j, th).size(); ++i) {
          const Complex wa = a.band(j, th).values()[i], wb = b.band(j, th).values()[i];
          const double d = std::abs(std::abs(wa) - std::abs(wb));
          EXPECT_LE(d, std::abs(wa - wb) + 1e-15);
          du += d * d;
          dw += std::norm(wa - wb);
        }
        EXPECT_LE(du, dw);
      }
  }
}

TEST(Luminance, Weights) {
  PlanarImage red(3, 4, 4);
  red.planes[0].fill(1.0);
  const auto red_luma = luminance_split(red).luma;
  for (double v : red_luma.values()) EXPECT_NEAR(v, 0.299, 1e-15);
  const auto plane = oracle::random_image(8, 8, 40);
  const auto gray = luminance_split(PlanarImage({plane, plane, plane}));
  EXPECT_LT(oracle::max_abs_diff(gray.luma, plane), 1e-15);
  EXPECT_EQ(gray.color_planes.size(), 3u);
  const auto zero_luma = luminance_split(PlanarImage(3, 4, 4)).luma;
  for (double v : zero_luma.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(luminance_split(PlanarImage(1, 4, 4)), ValidationError);
}

TEST(Lowpass, FilterHasUnitDcGainAndSymmetry) {
  const auto h = averaging_taps();
  ASSERT_EQ(h.size(), 14u);
  double s = 0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    s += h[n];
    EXPECT_NEAR(h[n], h[13 - n], 1e-15);
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Lowpass, ConstantStaysConstant) {
  const auto out = lowpass_project(RealImage(16, 16, 2.75), 2, 4);
  ASSERT_EQ(out.rows(), 4u);
  for (double v : out.values()) EXPECT_NEAR(v, 2.75, 1e-13);
}

TEST(Lowpass, IdentityAtTerminalScale) {
  RealImage x(4, 4);
  x(1, 2) = 1.0;
  EXPECT_EQ(lowpass_project(x, 4, 4), x);
}

TEST(Lowpass, StageMatchesDirectDoubleSum) {
  const auto x = oracle::random_image(16, 24, 41);
  EXPECT_LT(oracle::max_abs_diff(lowpass_stage(x), oracle::direct_lowpass_stage(x, averaging_taps())), 1e-13);
}

TEST(Lowpass, ProjectEqualsComposedStages) {
  const auto x = oracle::random_image(32, 32, 42);
  const auto h = averaging_taps();
  const auto expected = oracle::direct_lowpass_stage(oracle::direct_lowpass_stage(oracle::direct_lowpass_stage(x, h), h), h);
  EXPECT_LT(oracle::max_abs_diff(lowpass_project(x, 1, 4), expected), 1e-13);
  PropagatedSignal u{x, 1, 1, {1, kLumaPlane, 1, 0}};
  EXPECT_LT(oracle::max_abs_diff(lowpass_project(u, ScatterConfig{}), expected), 1e-13);
}

TEST(Lowpass, Errors) {
  EXPECT_THROW(lowpass_project(RealImage(4, 4), 5, 4), ParameterError);
  EXPECT_THROW(lowpass_project(RealImage(10, 16), 2, 4), DimensionError);
  EXPECT_THROW(lowpass_stage(RealImage(3, 4)), DimensionError);
}
