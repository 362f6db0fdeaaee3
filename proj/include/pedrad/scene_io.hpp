// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pedrad/types.hpp"

namespace pedrad {

/// One time-stamped triangulated body pose. Meters, x-y ground plane, +z up.
struct MeshFrame {
  double timestamp = 0.0;
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  bool empty() const { return triangles.empty(); }

  /// Throws GeometryError on out-of-range indices or zero-area facets.
  void validate() const;
};

/// Reads one frame in the OBJ subset (`v x y z`, `f i j k`, 1-based indices).
/// Blank lines and `#` comments are skipped; any other statement is a ParseError.
/// Faces with more than three vertices raise GeometryError.
MeshFrame load_obj(const std::filesystem::path& path);

/// Writes `v`/`f` lines with round-trip-exact coordinates.
void write_obj(const MeshFrame& mesh, const std::filesystem::path& path);

/// Expands a printf-style pattern such as `dir/frame_%04d.obj` into the
/// consecutive existing files, starting at index 0 (or 1 if 0 is absent).
/// A directory argument is shorthand for `<dir>/frame_%04d.obj`.
std::vector<std::filesystem::path> expand_frame_pattern(const std::string& pattern);

/// Loads every frame matched by the pattern; timestamps are index / frame_rate_hz.
std::vector<MeshFrame> load_mesh_sequence(const std::string& pattern, double frame_rate_hz);

/// Time series of B marker positions sampled at a uniform frame rate.
struct MarkerTrackSet {
  double frame_rate_hz = 0.0;
  std::vector<double> times;
  std::vector<std::string> names;
  /// frames[f][b] is the position of marker b at times[f].
  std::vector<std::vector<Vec3>> frames;

  std::size_t marker_count() const { return names.size(); }
  std::size_t frame_count() const { return frames.size(); }
  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }

  /// Throws FormatError / OrderingError when the invariants are broken.
  void validate() const;
};

/// CSV with header `time,<name>_x,<name>_y,<name>_z,...`.
MarkerTrackSet load_marker_tracks(const std::filesystem::path& path);
void write_marker_tracks(const MarkerTrackSet& tracks, const std::filesystem::path& path);

}  // namespace pedrad
