// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pedrad/em_sbr.hpp"
#include "pedrad/scene_io.hpp"
#include "pedrad/types.hpp"

namespace pedrad {

/// Natural cubic spline (zero second derivative at both ends).
class NaturalCubicSpline {
 public:
  /// Knots must be strictly increasing; at least two are required.
  NaturalCubicSpline(std::vector<double> knots, std::vector<double> values);

  /// Evaluates inside [front knot, back knot]; throws RangeError outside.
  /// Returns the stored sample exactly when x is a knot.
  double operator()(double x) const;

  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivatives at the knots
};

/// Marker positions resampled to the pulse repetition grid t_p = start + p * pri.
struct PrfTrackSet {
  double pri_s = 0.0;
  double start_time_s = 0.0;
  Vec3 radar_position = Vec3::Zero();
  std::size_t markers = 0;
  /// positions[p * markers + b]
  std::vector<Vec3> positions;
  /// ranges(p, b) = |positions - radar_position|
  Eigen::MatrixXd ranges;

  std::size_t span() const { return static_cast<std::size_t>(ranges.rows()); }
  double time_at(std::size_t p) const { return start_time_s + static_cast<double>(p) * pri_s; }
};

/// Throws RangeError when the requested PRI span leaves the MoCap time range
/// or a marker coincides with the radar.
PrfTrackSet interpolate_tracks(const MarkerTrackSet& markers, const Vec3& radar_position, double pri_s,
                               std::size_t span, double start_time_s);
PrfTrackSet interpolate_tracks(const MarkerTrackSet& markers, const Vec3& radar_position, double pri_s,
                               std::size_t span);

/// Linear-power RCS resampled to the PRI grid; spline undershoot is clamped to 0.
/// The series times are shifted by `time_offset_s` before resampling.
std::vector<double> interpolate_rcs(const RcsSeries& series, PolarizationPair pair, double pri_s, std::size_t span,
                                    double start_time_s, double time_offset_s = 0.0);

/// Number of whole PRIs available in [start, end].
std::size_t available_pris(double start_time_s, double end_time_s, double pri_s);

}  // namespace pedrad

namespace pedrad {

/// PRIs [first, first + count) of a track set; times and positions carried over.
PrfTrackSet slice_tracks(const PrfTrackSet& tracks, std::size_t first, std::size_t count);

}  // namespace pedrad
