// SPDX-License-Identifier: Apache-2.0
#include "pedrad/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "pedrad/error.hpp"

namespace pedrad {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values_.size() != n) throw ParameterError("spline needs at least two knots with matching values");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw OrderingError("spline knots must be strictly increasing");
  }
  second_.assign(n, 0.0);
  if (n == 2) return;

  // Tridiagonal system for interior second derivatives (Thomas algorithm).
  const std::size_t m = n - 2;
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = knots_[i] - knots_[i - 1];
    const double h1 = knots_[i + 1] - knots_[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double lower = knots_[i + 1] - knots_[i];  // h_{i}
    const double factor = lower / diag[i - 1];
    diag[i] -= factor * upper[i - 1];
    rhs[i] -= factor * rhs[i - 1];
  }
  second_[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    second_[i + 1] = (rhs[i] - upper[i] * second_[i + 2]) / diag[i];
  }
}

double NaturalCubicSpline::operator()(double x) const {
  if (!(x >= knots_.front() && x <= knots_.back())) throw RangeError("spline evaluated outside its knot range");
  if (x == knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[i + 1] - knots_[i];
  const double dx = x - knots_[i];
  if (dx == 0.0) return values_[i];
  const double slope =
      (values_[i + 1] - values_[i]) / h - h * (2.0 * second_[i] + second_[i + 1]) / 6.0;
  const double cubic = (second_[i + 1] - second_[i]) / (6.0 * h);
  return values_[i] + dx * (slope + dx * (0.5 * second_[i] + dx * cubic));
}

namespace {

// Grid instants slightly past the last knot because of rounding are pulled back inside.
double clamp_to_range(double t, double lo, double hi) {
  const double tol = 1e-9 * std::max(1.0, std::abs(hi));
  if (t < lo && t >= lo - tol) return lo;
  if (t > hi && t <= hi + tol) return hi;
  return t;
}

void check_span(double start, double pri, std::size_t span, double lo, double hi) {
  if (!(pri > 0.0)) throw ParameterError("PRI must be positive");
  if (span == 0) throw ParameterError("PRI span must be at least 1");
  const double tol = 1e-9 * std::max(1.0, std::abs(hi));
  const double end = start + static_cast<double>(span - 1) * pri;
  if (start < lo - tol || end > hi + tol) {
    throw RangeError("requested PRI span [" + std::to_string(start) + ", " + std::to_string(end) +
                     "] s exceeds data range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] s");
  }
}

}  // namespace

PrfTrackSet interpolate_tracks(const MarkerTrackSet& markers, const Vec3& radar_position, double pri_s,
                               std::size_t span, double start_time_s) {
  markers.validate();
  check_span(start_time_s, pri_s, span, markers.start_time(), markers.end_time());
  const std::size_t b_count = markers.marker_count();

  PrfTrackSet out;
  out.pri_s = pri_s;
  out.start_time_s = start_time_s;
  out.radar_position = radar_position;
  out.markers = b_count;
  out.positions.assign(span * b_count, Vec3::Zero());
  out.ranges.resize(static_cast<Eigen::Index>(span), static_cast<Eigen::Index>(b_count));

  std::vector<double> coord(markers.frame_count());
  for (std::size_t b = 0; b < b_count; ++b) {
    for (int k = 0; k < 3; ++k) {
      for (std::size_t f = 0; f < markers.frame_count(); ++f) coord[f] = markers.frames[f][b][k];
      const NaturalCubicSpline spline(markers.times, coord);
      for (std::size_t p = 0; p < span; ++p) {
        const double t = clamp_to_range(out.time_at(p), spline.front(), spline.back());
        out.positions[p * b_count + b][k] = spline(t);
      }
    }
    for (std::size_t p = 0; p < span; ++p) {
      const double r = (out.positions[p * b_count + b] - radar_position).norm();
      if (!(r > 0.0)) throw RangeError("marker " + markers.names[b] + " coincides with the radar");
      out.ranges(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)) = r;
    }
  }
  return out;
}

PrfTrackSet interpolate_tracks(const MarkerTrackSet& markers, const Vec3& radar_position, double pri_s,
                               std::size_t span) {
  return interpolate_tracks(markers, radar_position, pri_s, span, markers.start_time());
}

std::vector<double> interpolate_rcs(const RcsSeries& series, PolarizationPair pair, double pri_s, std::size_t span,
                                    double start_time_s, double time_offset_s) {
  const auto& values = series.values(pair);
  if (series.times.size() < 2) throw ParameterError("RCS series needs at least two frames");
  std::vector<double> knots(series.times);
  for (auto& t : knots) t += time_offset_s;
  check_span(start_time_s, pri_s, span, knots.front(), knots.back());
  const NaturalCubicSpline spline(std::move(knots), values);
  std::vector<double> out(span);
  for (std::size_t p = 0; p < span; ++p) {
    const double t = clamp_to_range(start_time_s + static_cast<double>(p) * pri_s, spline.front(), spline.back());
    out[p] = std::max(0.0, spline(t));
  }
  return out;
}

std::size_t available_pris(double start_time_s, double end_time_s, double pri_s) {
  if (end_time_s < start_time_s) return 0;
  const double ratio = (end_time_s - start_time_s) / pri_s;
  return static_cast<std::size_t>(std::floor(ratio + 1e-9)) + 1;
}

}  // namespace pedrad

namespace pedrad {

PrfTrackSet slice_tracks(const PrfTrackSet& tracks, std::size_t first, std::size_t count) {
  if (first + count > tracks.span()) throw RangeError("track slice exceeds the available PRIs");
  PrfTrackSet out;
  out.pri_s = tracks.pri_s;
  out.start_time_s = tracks.time_at(first);
  out.radar_position = tracks.radar_position;
  out.markers = tracks.markers;
  const auto begin = tracks.positions.begin() + static_cast<std::ptrdiff_t>(first * tracks.markers);
  out.positions.assign(begin, begin + static_cast<std::ptrdiff_t>(count * tracks.markers));
  out.ranges = tracks.ranges.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace pedrad
