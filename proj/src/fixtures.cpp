// SPDX-License-Identifier: Apache-2.0
#include "pedrad/fixtures.hpp"

#include <cmath>

#include "pedrad/error.hpp"

namespace pedrad::fixtures {
namespace {

// Joint positions of the body at one instant.
struct Pose {
  Vec3 pelvis, l5, l3, t12, t8, neck, head, head_top;
  std::array<Vec3, 2> clavicle, shoulder, elbow, wrist, hand_tip;
  std::array<Vec3, 2> hip, knee, ankle, toe, toe_tip;
};

Vec3 swing(const Vec3& origin, double length, double angle) {
  return origin + Vec3(length * std::sin(angle), 0.0, -length * std::cos(angle));
}

Pose pose_at(const MannequinConfig& c, double t) {
  const double phase = 2.0 * kPi * c.stride_hz * t;
  const double x = -c.start_distance_m + c.speed_mps * t;
  const double bob = 0.02 * std::cos(2.0 * phase);
  Pose p;
  p.pelvis = Vec3(x, 0.0, 1.0 + bob);
  p.l5 = p.pelvis + Vec3(0, 0, 0.08);
  p.l3 = p.pelvis + Vec3(0, 0, 0.16);
  p.t12 = p.pelvis + Vec3(0, 0, 0.24);
  p.t8 = p.pelvis + Vec3(0, 0, 0.36);
  p.neck = p.pelvis + Vec3(0, 0, 0.52);
  p.head = p.pelvis + Vec3(0, 0, 0.62);
  p.head_top = p.pelvis + Vec3(0, 0, 0.84);
  for (int s = 0; s < 2; ++s) {
    const double side = s == 0 ? -1.0 : 1.0;  // right, left
    const double leg = (s == 0 ? 1.0 : -1.0) * 0.42 * std::sin(phase);
    const double arm = -(s == 0 ? 1.0 : -1.0) * 0.35 * std::sin(phase);
    const double knee_flex = 0.5 * std::max(0.0, std::sin(phase + (s == 0 ? 0.0 : kPi) - 0.6));
    p.clavicle[s] = p.neck + Vec3(0, side * 0.06, -0.04);
    p.shoulder[s] = p.neck + Vec3(0, side * 0.19, -0.06);
    p.elbow[s] = swing(p.shoulder[s], 0.29, arm);
    p.wrist[s] = swing(p.elbow[s], 0.26, arm + 0.25 + 0.15 * std::sin(phase));
    p.hand_tip[s] = swing(p.wrist[s], 0.17, arm + 0.3);
    p.hip[s] = p.pelvis + Vec3(0, side * 0.10, -0.05);
    p.knee[s] = swing(p.hip[s], 0.45, leg);
    p.ankle[s] = swing(p.knee[s], 0.43, leg - knee_flex);
    p.toe[s] = p.ankle[s] + Vec3(0.14, 0, -0.05);
    p.toe_tip[s] = p.toe[s] + Vec3(0.06, 0, 0);
  }
  return p;
}

Eigen::Matrix3d frame_along(const Vec3& direction) {
  const Vec3 e3 = direction.normalized();
  const Vec3 helper = std::abs(e3.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = helper.cross(e3).normalized();
  const Vec3 e2 = e3.cross(e1);
  Eigen::Matrix3d m;
  m.col(0) = e1;
  m.col(1) = e2;
  m.col(2) = e3;
  return m;
}

MeshFrame limb(const Vec3& a, const Vec3& b, double r1, double r2, const MannequinConfig& c) {
  const Vec3 d = b - a;
  return make_ellipsoid(0.5 * (a + b), Vec3(r1, r2, 0.5 * d.norm() + 0.02), frame_along(d), c.rings, c.segments);
}

}  // namespace

MeshFrame make_plate(double side, const Vec3& center, std::size_t cells) {
  if (!(side > 0.0)) throw ParameterError("plate side must be positive");
  if (cells < 1) throw ParameterError("plate needs at least one cell");
  MeshFrame m;
  const double h = side / static_cast<double>(cells);
  for (std::size_t j = 0; j <= cells; ++j) {
    for (std::size_t i = 0; i <= cells; ++i) {
      m.vertices.emplace_back(center.x(), center.y() - side / 2 + static_cast<double>(i) * h,
                              center.z() - side / 2 + static_cast<double>(j) * h);
    }
  }
  const auto idx = [cells](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>(j * (cells + 1) + i); };
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t i = 0; i < cells; ++i) {
      m.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      m.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
  return m;
}

MeshFrame make_ellipsoid(const Vec3& center, const Vec3& radii, const Eigen::Matrix3d& axes, std::size_t rings,
                         std::size_t segments) {
  if (rings < 2 || segments < 3) throw ParameterError("ellipsoid needs rings >= 2 and segments >= 3");
  MeshFrame m;
  const auto place = [&](double theta, double phi) {
    const Vec3 local(radii.x() * std::sin(theta) * std::cos(phi), radii.y() * std::sin(theta) * std::sin(phi),
                     radii.z() * std::cos(theta));
    return Vec3(center + axes * local);
  };
  m.vertices.push_back(place(0.0, 0.0));
  for (std::size_t r = 1; r < rings; ++r) {
    const double theta = kPi * static_cast<double>(r) / static_cast<double>(rings);
    for (std::size_t s = 0; s < segments; ++s) {
      m.vertices.push_back(place(theta, 2.0 * kPi * static_cast<double>(s) / static_cast<double>(segments)));
    }
  }
  m.vertices.push_back(place(kPi, 0.0));
  const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
  const auto ring = [segments](std::size_t r, std::size_t s) {
    return static_cast<std::uint32_t>(1 + (r - 1) * segments + s % segments);
  };
  for (std::size_t s = 0; s < segments; ++s) m.triangles.push_back({0, ring(1, s), ring(1, s + 1)});
  for (std::size_t r = 1; r + 1 < rings; ++r) {
    for (std::size_t s = 0; s < segments; ++s) {
      m.triangles.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      m.triangles.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  }
  for (std::size_t s = 0; s < segments; ++s) m.triangles.push_back({ring(rings - 1, s + 1), ring(rings - 1, s), south});
  return m;
}

void append_mesh(MeshFrame& mesh, const MeshFrame& part) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), part.vertices.begin(), part.vertices.end());
  for (const auto& t : part.triangles) mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

const std::array<std::string, 23>& marker_names() {
  static const std::array<std::string, 23> names = {
      "Pelvis",        "L5",           "L3",           "T12",          "T8",           "Neck",
      "Head",          "RightShoulder", "RightUpperArm", "RightForeArm", "RightHand",    "LeftShoulder",
      "LeftUpperArm",  "LeftForeArm",  "LeftHand",     "RightUpperLeg", "RightLowerLeg", "RightFoot",
      "RightToe",      "LeftUpperLeg", "LeftLowerLeg", "LeftFoot",     "LeftToe"};
  return names;
}

WalkingMannequin::WalkingMannequin(MannequinConfig config) : config_(config) {
  if (config_.rings < 2 || config_.segments < 3) throw ParameterError("mannequin tessellation too coarse");
}

std::array<Vec3, 23> WalkingMannequin::markers(double t) const {
  const Pose p = pose_at(config_, t);
  std::array<Vec3, 23> m;
  m[0] = p.pelvis;
  m[1] = p.l5;
  m[2] = p.l3;
  m[3] = p.t12;
  m[4] = p.t8;
  m[5] = p.neck;
  m[6] = p.head;
  for (int s = 0; s < 2; ++s) {
    const std::size_t arm = s == 0 ? 7 : 11;
    m[arm] = p.clavicle[s];
    m[arm + 1] = p.shoulder[s];
    m[arm + 2] = p.elbow[s];
    m[arm + 3] = p.wrist[s];
    const std::size_t leg = s == 0 ? 15 : 19;
    m[leg] = p.hip[s];
    m[leg + 1] = p.knee[s];
    m[leg + 2] = p.ankle[s];
    m[leg + 3] = p.toe[s];
  }
  return m;
}

MeshFrame WalkingMannequin::mesh(double t) const {
  const Pose p = pose_at(config_, t);
  const auto& c = config_;
  MeshFrame body;
  body.timestamp = t;
  const Eigen::Matrix3d upright = Eigen::Matrix3d::Identity();
  append_mesh(body, make_ellipsoid(0.5 * (p.head + p.head_top), Vec3(0.10, 0.08, 0.12), upright, c.rings, c.segments));
  append_mesh(body, limb(p.neck + Vec3(0, 0, -0.03), p.head, 0.05, 0.05, c));
  append_mesh(body, make_ellipsoid(0.5 * (p.t12 + p.neck), Vec3(0.12, 0.18, 0.16), upright, c.rings, c.segments));
  append_mesh(body, make_ellipsoid(p.l3, Vec3(0.11, 0.15, 0.10), upright, c.rings, c.segments));
  append_mesh(body, make_ellipsoid(p.pelvis, Vec3(0.12, 0.17, 0.09), upright, c.rings, c.segments));
  for (int s = 0; s < 2; ++s) {
    append_mesh(body, limb(p.shoulder[s], p.elbow[s], 0.05, 0.05, c));
    append_mesh(body, limb(p.elbow[s], p.hand_tip[s], 0.04, 0.04, c));
    append_mesh(body, limb(p.hip[s], p.knee[s], 0.075, 0.075, c));
    append_mesh(body, limb(p.knee[s], p.ankle[s], 0.055, 0.055, c));
    append_mesh(body, limb(p.ankle[s] + Vec3(-0.04, 0, -0.03), p.toe_tip[s], 0.045, 0.035, c));
  }
  return body;
}

MarkerTrackSet WalkingMannequin::sample_markers(std::size_t frames, double frame_rate_hz) const {
  if (!(frame_rate_hz > 0.0)) throw ParameterError("frame rate must be positive");
  MarkerTrackSet set;
  set.frame_rate_hz = frame_rate_hz;
  set.names.assign(marker_names().begin(), marker_names().end());
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) / frame_rate_hz;
    const auto m = markers(t);
    set.times.push_back(t);
    set.frames.emplace_back(m.begin(), m.end());
  }
  return set;
}

std::vector<MeshFrame> WalkingMannequin::sample_meshes(std::size_t frames, double frame_rate_hz) const {
  if (!(frame_rate_hz > 0.0)) throw ParameterError("frame rate must be positive");
  std::vector<MeshFrame> out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) out.push_back(mesh(static_cast<double>(f) / frame_rate_hz));
  return out;
}

PrfTrackSet point_target_tracks(double r0_m, double speed_mps, double pri_s, std::size_t span, const Vec3& radar) {
  if (!(pri_s > 0.0)) throw ParameterError("PRI must be positive");
  PrfTrackSet tracks;
  tracks.pri_s = pri_s;
  tracks.radar_position = radar;
  tracks.markers = 1;
  tracks.ranges.resize(static_cast<Eigen::Index>(span), 1);
  for (std::size_t p = 0; p < span; ++p) {
    const double r = r0_m - speed_mps * static_cast<double>(p) * pri_s;
    if (!(r > 0.0)) throw RangeError("point target reaches the radar");
    tracks.positions.push_back(radar + Vec3(r, 0.0, 0.0));
    tracks.ranges(static_cast<Eigen::Index>(p), 0) = r;
  }
  return tracks;
}

}  // namespace pedrad::fixtures

#include <cstdio>

#include "pedrad/text_io.hpp"

namespace pedrad::fixtures {

std::filesystem::path write_walking_fixture(const std::filesystem::path& dir, const WalkingFixtureOptions& options) {
  options.radar.validate();
  if (options.blocks < 1) throw ParameterError("fixture needs at least one block");
  const double duration = static_cast<double>(options.blocks) * options.radar.block_duration();
  const auto frames = static_cast<std::size_t>(std::ceil(duration * options.frame_rate_hz)) + 2;
  const WalkingMannequin body(options.mannequin);

  std::filesystem::create_directories(dir / "frames");
  for (std::size_t f = 0; f < frames; ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.obj", f);
    write_obj(body.mesh(static_cast<double>(f) / options.frame_rate_hz), dir / "frames" / name);
  }
  write_marker_tracks(body.sample_markers(frames, options.frame_rate_hz), dir / "markers.csv");

  const auto& r = options.radar;
  std::string ini = "# synthetic walking-mannequin scene\n[paths]\n";
  ini += "mesh_pattern = frames/frame_%04d.obj\nmarker_file = markers.csv\noutput_dir = out\n\n";
  const Vec3& rp = options.radar_position;
  ini += "[scene]\nmesh_frame_rate_hz = " + text::format_double(options.frame_rate_hz) + "\nradar_position = " +
         text::format_double(rp.x()) + "," + text::format_double(rp.y()) + "," + text::format_double(rp.z()) + "\n\n";
  ini += "[radar]\ncarrier_hz = " + text::format_double(r.carrier_hz) + "\nbandwidth_hz = " +
         text::format_double(r.bandwidth_hz) + "\nsample_rate_hz = " + text::format_double(r.sample_rate_hz) +
         "\nupchirp_s = " + text::format_double(r.upchirp_s) + "\npri_s = " + text::format_double(r.pri_s) +
         "\nchirps_per_cpi = " + std::to_string(r.chirps_per_cpi) + "\ncpis = " + std::to_string(r.cpis) + "\n\n";
  ini += "[aspect]\npairs = vv\nmax_bounces = 2\nray_spacing_m = " + text::format_double(options.ray_spacing_m) +
         "\ncoarse_mode = true\n\n";
  ini += "[estimation]\nstride = " + std::to_string(options.stride) + "\nmax_blocks = " +
         std::to_string(options.blocks) + "\n\n";
  ini += "[signature]\nwrite_csv = true\n";
  const auto config = dir / "pipeline.ini";
  text::write_file(config, ini);
  return config;
}

}  // namespace pedrad::fixtures
