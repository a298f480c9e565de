#include <array>
#include <cmath>
#include <numbers>

#include "scatterkit/crossorient.hpp"

namespace scatterkit {
namespace {

struct Tap {
  std::size_t a, b;
  int theta;
  Complex value;
};

CrossOrientFilter from_taps(const char* name, std::initializer_list<Tap> taps) {
  CrossOrientFilter f(3, 3, name);
  for (const auto& t : taps) f.at(t.a, t.b, t.theta) = t.value;
  return f;
}

// Each extended orientation placed on the neighbour its edge direction points
// away from, so the 12 edges trace a closed loop around the centre.
CrossOrientFilter ring_filter() {
  CrossOrientFilter f(3, 3, "ring");
  for (int t = 0; t < kExtendedOrientations; ++t) {
    const double normal = (15.0 + 30.0 * t + 90.0) * std::numbers::pi / 180.0;
    const auto a = static_cast<std::size_t>(1 - std::lround(std::sin(normal)));
    const auto b = static_cast<std::size_t>(1 + std::lround(std::cos(normal)));
    f.at(a, b, t) += 1.0;
  }
  return f;
}

}  // namespace

std::vector<CrossOrientFilter> spatial_gallery() {
  const Complex j(0.0, 1.0);
  return {
      from_taps("corner3x3", {{1, 0, 0, 1.0}, {1, 1, 0, j}, {0, 1, 3, 1.0}, {1, 1, 3, j}}),
      from_taps("cross3x3", {{1, 0, 0, 1.0}, {1, 2, 0, 1.0}, {0, 1, 3, j}, {2, 1, 3, j},
                             {1, 1, 0, j}, {1, 1, 3, 1.0}}),
      from_taps("curve3x3", {{1, 0, 0, 1.0}, {1, 1, 1, j}, {1, 2, 2, 1.0}, {0, 2, 3, j}}),
      ring_filter(),
  };
}

}  // namespace scatterkit
