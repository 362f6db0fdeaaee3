// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "pedrad/error.hpp"
#include "pedrad/kinematics.hpp"

using namespace pedrad;

namespace {

MarkerTrackSet sine_markers(double rate, std::size_t frames, double start = 0.0) {
  MarkerTrackSet m;
  m.frame_rate_hz = rate;
  m.names = {"A", "B"};
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = start + static_cast<double>(f) / rate;
    m.times.push_back(t);
    m.frames.push_back({Vec3(3.0 + 0.2 * std::sin(2.0 * kPi * t), 0.0, 1.0), Vec3(-2.0 + 1.5 * t, 0.5, 0.2)});
  }
  return m;
}

}  // namespace

TEST_CASE("spline interpolates knots exactly and reproduces lines") {
  const std::vector<double> x = {0.0, 0.1, 0.25, 0.3, 0.7};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 - 3.0 * v);
  const NaturalCubicSpline s(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(s(x[i]) == y[i]);
  for (double t = 0.0; t <= 0.7; t += 0.013) CHECK(s(t) == doctest::Approx(2.0 - 3.0 * t).epsilon(1e-13));
  CHECK_THROWS_AS(s(-0.1), RangeError);
  CHECK_THROWS_AS(s(0.71), RangeError);
  CHECK_THROWS(NaturalCubicSpline({0.0, 0.0}, {1.0, 2.0}));
  CHECK_THROWS(NaturalCubicSpline({0.0}, {1.0}));
}

TEST_CASE("spline tracks an analytic sine between 60 Hz samples") {
  std::vector<double> x, y;
  for (int i = 0; i <= 120; ++i) {
    x.push_back(i / 60.0);
    y.push_back(std::sin(2.0 * kPi * x.back()));
  }
  const NaturalCubicSpline s(x, y);
  double worst = 0.0;
  for (double t = 0.25; t <= 1.75; t += 1e-3) worst = std::max(worst, std::abs(s(t) - std::sin(2.0 * kPi * t)));
  // Cubic interpolation error bound h^4 max|f''''| * 5/384.
  const double h = 1.0 / 60.0;
  CHECK(worst < 5.0 / 384.0 * std::pow(h, 4) * std::pow(2.0 * kPi, 4) * 1.5);
}

TEST_CASE("tracks resample onto the PRI grid") {
  const auto m = sine_markers(60.0, 61, 0.5);
  const Vec3 radar(0, 0, 0.65);
  const double pri = 61.2e-6;
  const auto tracks = interpolate_tracks(m, radar, pri, 1000);
  CHECK(tracks.span() == 1000);
  CHECK(tracks.markers == 2);
  CHECK(tracks.start_time_s == 0.5);
  CHECK(tracks.positions[0] == m.frames[0][0]);
  for (std::size_t p : {0u, 17u, 999u}) {
    const Vec3 b = tracks.positions[p * 2 + 1];
    CHECK(b.x() == doctest::Approx(-2.0 + 1.5 * tracks.time_at(p)).epsilon(1e-12));
    CHECK(tracks.ranges(static_cast<Eigen::Index>(p), 1) == doctest::Approx((b - radar).norm()).epsilon(1e-15));
  }
  CHECK_THROWS_AS(interpolate_tracks(m, radar, pri, 20000), RangeError);
  CHECK_THROWS_AS(interpolate_tracks(m, Vec3(3.0, 0.0, 1.0), pri, 10), RangeError);
  CHECK(available_pris(0.0, 1.0, 0.25) == 5);

  const auto part = slice_tracks(tracks, 100, 50);
  CHECK(part.span() == 50);
  CHECK(part.start_time_s == doctest::Approx(tracks.time_at(100)));
  CHECK(part.ranges(0, 1) == tracks.ranges(100, 1));
  CHECK(part.positions[99] == tracks.positions[299]);
  CHECK_THROWS(slice_tracks(tracks, 990, 20));
}

TEST_CASE("rcs resampling clamps undershoot and honours the time offset") {
  RcsSeries s;
  s.frame_rate_hz = 10.0;
  for (int i = 0; i < 7; ++i) s.times.push_back(i / 10.0);
  s.sigma[static_cast<int>(PolarizationPair::vv)] = {0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0};
  const auto vals = interpolate_rcs(s, PolarizationPair::vv, 1e-3, 600, 0.0);
  CHECK(*std::min_element(vals.begin(), vals.end()) == 0.0);
  CHECK(vals[300] == 5.0);

  const auto shifted = interpolate_rcs(s, PolarizationPair::vv, 1e-3, 600, 2.0, 2.0);
  REQUIRE(shifted.size() == vals.size());
  for (std::size_t p = 0; p < vals.size(); p += 37) CHECK(shifted[p] == doctest::Approx(vals[p]).epsilon(1e-9));
  CHECK_THROWS(interpolate_rcs(s, PolarizationPair::hh, 1e-3, 10, 0.0));
  CHECK_THROWS_AS(interpolate_rcs(s, PolarizationPair::vv, 1e-3, 10, 1.0), RangeError);
}
