// SPDX-License-Identifier: Apache-2.0
#include "pedrad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pedrad/error.hpp"

namespace pedrad {

Ray Ray::make(const Vec3& origin, const Vec3& direction) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("ray direction must be a finite non-zero vector");
  return Ray{origin, direction / n};
}

std::optional<Hit> intersect_ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  const Vec3 face = e1.cross(e2);
  const double face_norm = face.norm();
  // |det| = |d . (e1 x e2)|; compare against the facet scale so that the
  // parallel test does not depend on triangle size.
  if (std::abs(det) <= 1e-14 * face_norm) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv_det;
  if (!(t > kHitEpsilon)) return std::nullopt;

  Hit hit;
  hit.distance = t;
  hit.point = ray.origin + t * ray.direction;
  hit.normal = face / face_norm;
  if (hit.normal.dot(ray.direction) > 0.0) hit.normal = -hit.normal;
  return hit;
}

std::optional<double> Aabb::entry(const Ray& ray, double max_distance) const {
  double t0 = 0.0;
  double t1 = max_distance;
  for (int k = 0; k < 3; ++k) {
    const double d = ray.direction[k];
    const double o = ray.origin[k];
    if (d == 0.0) {
      if (o < lo[k] || o > hi[k]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d;
    double tn = (lo[k] - o) * inv;
    double tf = (hi[k] - o) * inv;
    if (tn > tf) std::swap(tn, tf);
    t0 = std::max(t0, tn);
    t1 = std::min(t1, tf);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

namespace {

Aabb box_of(const MeshFrame& mesh, std::span<const std::uint32_t> members) {
  Aabb box;
  for (const auto t : members) {
    for (const auto v : mesh.triangles[t]) box.expand(mesh.vertices[v]);
  }
  return box;
}

Vec3 centroid(const MeshFrame& mesh, std::uint32_t t) {
  const auto& tri = mesh.triangles[t];
  return (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
}

}  // namespace

std::vector<BoundingGroup> build_groups(const MeshFrame& mesh, int target_group_count) {
  if (target_group_count < 1) throw ParameterError("target group count must be at least 1");

  std::vector<std::vector<std::uint32_t>> parts(1);
  parts[0].resize(mesh.triangles.size());
  std::iota(parts[0].begin(), parts[0].end(), 0u);

  std::vector<Vec3> centroids(mesh.triangles.size());
  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) centroids[t] = centroid(mesh, t);

  while (parts.size() < static_cast<std::size_t>(target_group_count)) {
    std::size_t pick = parts.size();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].size() >= 2 && (pick == parts.size() || parts[i].size() > parts[pick].size())) pick = i;
    }
    if (pick == parts.size()) break;

    auto& members = parts[pick];
    const Aabb box = box_of(mesh, members);
    const Vec3 extent = box.hi - box.lo;
    int axis = 0;
    if (extent[1] > extent[axis]) axis = 1;
    if (extent[2] > extent[axis]) axis = 2;

    const auto mid = members.begin() + static_cast<std::ptrdiff_t>(members.size() / 2);
    std::nth_element(members.begin(), mid, members.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double ca = centroids[a][axis];
      const double cb = centroids[b][axis];
      return ca < cb || (ca == cb && a < b);
    });
    std::vector<std::uint32_t> upper(mid, members.end());
    members.erase(mid, members.end());
    std::sort(members.begin(), members.end());
    std::sort(upper.begin(), upper.end());
    parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(pick) + 1, std::move(upper));
  }

  std::vector<BoundingGroup> groups;
  groups.reserve(parts.size());
  for (auto& members : parts) {
    if (members.empty()) continue;
    BoundingGroup g;
    g.box = box_of(mesh, members);
    g.members = std::move(members);
    groups.push_back(std::move(g));
  }
  return groups;
}

int default_group_count(std::size_t triangle_count) {
  return static_cast<int>(std::clamp<std::size_t>(triangle_count / 64, 1, 4096));
}

std::optional<Hit> nearest_hit(const Ray& ray, std::span<const BoundingGroup> groups, const MeshFrame& mesh,
                               TraversalStats* stats, std::int64_t skip_triangle) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::uint32_t>> entered;
  entered.reserve(groups.size());
  for (std::uint32_t g = 0; g < groups.size(); ++g) {
    if (stats) ++stats->box_tests;
    if (const auto t = groups[g].box.entry(ray, kInf)) entered.emplace_back(*t, g);
  }
  std::sort(entered.begin(), entered.end());

  std::optional<Hit> best;
  for (const auto& [t_entry, g] : entered) {
    if (best && t_entry > best->distance) break;
    for (const auto t : groups[g].members) {
      if (static_cast<std::int64_t>(t) == skip_triangle) continue;
      if (stats) ++stats->triangle_tests;
      const auto& tri = mesh.triangles[t];
      auto hit = intersect_ray_triangle(ray, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
      if (hit && (!best || hit->distance < best->distance || (hit->distance == best->distance && t < best->triangle))) {
        hit->triangle = t;
        best = hit;
      }
    }
  }
  return best;
}

std::optional<Hit> exhaustive_nearest_hit(const Ray& ray, const MeshFrame& mesh, TraversalStats* stats,
                                          std::int64_t skip_triangle) {
  std::optional<Hit> best;
  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
    if (static_cast<std::int64_t>(t) == skip_triangle) continue;
    if (stats) ++stats->triangle_tests;
    const auto& tri = mesh.triangles[t];
    auto hit = intersect_ray_triangle(ray, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    if (hit && (!best || hit->distance < best->distance)) {
      hit->triangle = t;
      best = hit;
    }
  }
  return best;
}

GroupedMesh::GroupedMesh(MeshFrame mesh, int target_group_count)
    : mesh_(std::move(mesh)), groups_(build_groups(mesh_, target_group_count)) {}

GroupedMesh::GroupedMesh(MeshFrame mesh) : mesh_(std::move(mesh)) {
  groups_ = build_groups(mesh_, default_group_count(mesh_.triangles.size()));
}

}  // namespace pedrad
