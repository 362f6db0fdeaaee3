// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "pedrad/kinematics.hpp"
#include "pedrad/scene_io.hpp"

namespace pedrad::fixtures {

/// Square plate of side `side` in the plane x = center.x, split into
/// 2 * cells^2 triangles.
MeshFrame make_plate(double side, const Vec3& center = Vec3::Zero(), std::size_t cells = 1);

/// Ellipsoid with semi-axes `radii` along the columns of `axes`.
MeshFrame make_ellipsoid(const Vec3& center, const Vec3& radii, const Eigen::Matrix3d& axes, std::size_t rings,
                         std::size_t segments);

/// Appends `part` to `mesh`, renumbering its vertices.
void append_mesh(MeshFrame& mesh, const MeshFrame& part);

/// The 23 marker names in output order.
const std::array<std::string, 23>& marker_names();

struct MannequinConfig {
  /// Pelvis starts at x = -start_distance and walks along +x.
  double start_distance_m = 5.0;
  double speed_mps = 1.5;
  double stride_hz = 0.9;
  std::size_t rings = 10;
  std::size_t segments = 12;
};

/// Articulated ellipsoid body with a sinusoidal gait.
class WalkingMannequin {
 public:
  explicit WalkingMannequin(MannequinConfig config = {});

  std::array<Vec3, 23> markers(double t) const;
  MeshFrame mesh(double t) const;

  MarkerTrackSet sample_markers(std::size_t frames, double frame_rate_hz) const;
  std::vector<MeshFrame> sample_meshes(std::size_t frames, double frame_rate_hz) const;

  const MannequinConfig& config() const { return config_; }

 private:
  MannequinConfig config_;
};

/// One scatterer on the x axis in front of `radar`, starting at range r0 and
/// closing at `speed` (negative speed recedes).
PrfTrackSet point_target_tracks(double r0_m, double speed_mps, double pri_s, std::size_t span,
                                const Vec3& radar = Vec3::Zero());

}  // namespace pedrad::fixtures

#include <filesystem>

#include "pedrad/radar_synth.hpp"

namespace pedrad::fixtures {

struct WalkingFixtureOptions {
  MannequinConfig mannequin;
  /// Whole estimation blocks the motion must cover.
  std::size_t blocks = 2;
  double frame_rate_hz = 60.0;
  double ray_spacing_m = 0.004;
  std::size_t stride = 80;
  /// Off the walking line so mirrored left/right markers get distinct ranges.
  Vec3 radar_position{0.0, 1.0, 0.65};
  RadarParams radar;
};

/// Writes frames/frame_NNNN.obj, markers.csv and pipeline.ini under `dir`;
/// returns the config path. The config runs in coarse ray mode.
std::filesystem::path write_walking_fixture(const std::filesystem::path& dir, const WalkingFixtureOptions& options = {});

}  // namespace pedrad::fixtures
