// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pedrad/scene_io.hpp"
#include "pedrad/types.hpp"

namespace pedrad {

/// Self-intersection guard: hits closer than this are ignored.
inline constexpr double kHitEpsilon = 1e-9;

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();

  /// Normalizes `direction`; throws ParameterError for a zero vector.
  static Ray make(const Vec3& origin, const Vec3& direction);
};

struct Hit {
  double distance = 0.0;
  Vec3 point = Vec3::Zero();
  /// Unit facet normal turned to face the incoming ray (normal . direction < 0).
  Vec3 normal = Vec3::UnitZ();
  std::uint32_t triangle = 0;
};

/// Moller-Trumbore test. A hit requires distance > kHitEpsilon.
std::optional<Hit> intersect_ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c);

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  /// Parametric entry distance of the ray into the box, if it is entered at
  /// some distance in [0, max_distance].
  std::optional<double> entry(const Ray& ray, double max_distance) const;
};

struct BoundingGroup {
  Aabb box;
  std::vector<std::uint32_t> members;
};

/// Recursive median split: the most populated group is split at the median
/// triangle centroid along the longest axis of its box, until the target
/// count is reached or no group holds two triangles. Boxes are shrink-wrapped.
std::vector<BoundingGroup> build_groups(const MeshFrame& mesh, int target_group_count);

/// Default group count used by the tracer for a mesh of the given size.
int default_group_count(std::size_t triangle_count);

struct TraversalStats {
  std::uint64_t box_tests = 0;
  std::uint64_t triangle_tests = 0;
};

/// Nearest hit over the grouped mesh. Boxes are visited in order of entry
/// distance and traversal stops once the next box starts beyond the best hit.
/// `skip_triangle` excludes one facet (the one a bounced ray leaves from).
std::optional<Hit> nearest_hit(const Ray& ray, std::span<const BoundingGroup> groups, const MeshFrame& mesh,
                               TraversalStats* stats = nullptr, std::int64_t skip_triangle = -1);

/// Reference search over every triangle.
std::optional<Hit> exhaustive_nearest_hit(const Ray& ray, const MeshFrame& mesh, TraversalStats* stats = nullptr,
                                          std::int64_t skip_triangle = -1);

/// A mesh frame bundled with its bounding groups; immutable after construction
/// and safe to query from many threads.
class GroupedMesh {
 public:
  GroupedMesh(MeshFrame mesh, int target_group_count);
  explicit GroupedMesh(MeshFrame mesh);

  const MeshFrame& mesh() const { return mesh_; }
  std::span<const BoundingGroup> groups() const { return groups_; }

  std::optional<Hit> nearest_hit(const Ray& ray, TraversalStats* stats = nullptr,
                                 std::int64_t skip_triangle = -1) const {
    return pedrad::nearest_hit(ray, groups_, mesh_, stats, skip_triangle);
  }

 private:
  MeshFrame mesh_;
  std::vector<BoundingGroup> groups_;
};

}  // namespace pedrad
