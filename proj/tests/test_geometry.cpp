// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "pedrad/error.hpp"
#include "pedrad/fixtures.hpp"
#include "pedrad/geometry.hpp"

using namespace pedrad;

namespace {

// Independent oracle: solve o + t d = a + u (b - a) + v (c - a) as a 3x3 system.
std::optional<double> barycentric_oracle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  Eigen::Matrix3d m;
  m.col(0) = -ray.direction;
  m.col(1) = b - a;
  m.col(2) = c - a;
  if (std::abs(m.determinant()) < 1e-12) return std::nullopt;
  const Vec3 x = m.fullPivLu().solve(ray.origin - a);
  const double t = x(0), u = x(1), v = x(2);
  if (u < 0 || v < 0 || u + v > 1 || t <= kHitEpsilon) return std::nullopt;
  return t;
}

}  // namespace

TEST_CASE("ray-triangle agrees with a barycentric solve") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
    const Ray ray = Ray::make(Vec3(u(rng), u(rng), u(rng)) * 3.0, Vec3(u(rng), u(rng), u(rng)));
    const auto got = intersect_ray_triangle(ray, a, b, c);
    const auto want = barycentric_oracle(ray, a, b, c);
    // Skip near-boundary cases where either classification is legitimate.
    Eigen::Matrix3d m;
    m.col(0) = -ray.direction;
    m.col(1) = b - a;
    m.col(2) = c - a;
    const Vec3 x = m.fullPivLu().solve(ray.origin - a);
    const double margin = std::min({x(1), x(2), 1.0 - x(1) - x(2)});
    if (std::abs(margin) < 1e-9 || std::abs(m.determinant()) < 1e-9) continue;
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      ++hits;
      CHECK(got->distance == doctest::Approx(*want).epsilon(1e-9));
      CHECK(got->normal.dot(ray.direction) < 0.0);
      CHECK((got->point - (ray.origin + got->distance * ray.direction)).norm() < 1e-9);
    }
  }
  CHECK(hits > 100);
}

TEST_CASE("ray-triangle edge cases") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  CHECK_FALSE(intersect_ray_triangle(Ray::make(Vec3(0.2, 0.2, 1), Vec3(1, 0, 0)), a, b, c));  // parallel
  CHECK_FALSE(intersect_ray_triangle(Ray::make(Vec3(0.2, 0.2, -1), Vec3(0, 0, -1)), a, b, c));  // behind
  CHECK_FALSE(intersect_ray_triangle(Ray::make(Vec3(0.2, 0.2, 0), Vec3(0, 0, -1)), a, b, c));  // origin on facet
  CHECK(intersect_ray_triangle(Ray::make(Vec3(0.2, 0.2, 1), Vec3(0, 0, -1)), a, b, c));
  CHECK_THROWS_AS(Ray::make(Vec3::Zero(), Vec3::Zero()), ParameterError);
}

TEST_CASE("bounding groups partition the mesh and contain their members") {
  const auto body = fixtures::WalkingMannequin().mesh(0.3);
  REQUIRE(body.triangles.size() >= 3000);
  for (int target : {1, 7, 64, 500}) {
    const auto groups = build_groups(body, target);
    CHECK(groups.size() == static_cast<std::size_t>(target));
    std::vector<int> seen(body.triangles.size(), 0);
    for (const auto& g : groups) {
      CHECK_FALSE(g.members.empty());
      for (auto t : g.members) {
        ++seen[t];
        for (auto v : body.triangles[t]) CHECK(g.box.contains(body.vertices[v]));
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
  CHECK_THROWS_AS(build_groups(body, 0), ParameterError);
  const auto tiny = fixtures::make_plate(1.0);
  CHECK(build_groups(tiny, 10).size() == 2);
}

TEST_CASE("grouped nearest hit equals exhaustive search with fewer triangle tests") {
  const GroupedMesh body(fixtures::WalkingMannequin().mesh(0.5));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TraversalStats grouped, exhaustive;
  int hits = 0;
  for (int i = 0; i < 3000; ++i) {
    const Vec3 target = Vec3(-4.25, 0.0, 1.0) + Vec3(0.3 * u(rng), 0.3 * u(rng), 0.9 * u(rng));
    const Vec3 origin = target + Vec3(3.0 * u(rng), 3.0 * u(rng), 3.0 * u(rng));
    const Ray ray = Ray::make(origin, target - origin);
    const auto a = body.nearest_hit(ray, &grouped);
    const auto b = exhaustive_nearest_hit(ray, body.mesh(), &exhaustive);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      ++hits;
      CHECK(a->triangle == b->triangle);
      CHECK(a->distance == b->distance);
    }
  }
  CHECK(hits > 1000);
  CHECK(grouped.triangle_tests * 10 < exhaustive.triangle_tests);
}

TEST_CASE("aabb entry distances") {
  Aabb box;
  box.expand(Vec3(0, 0, 0));
  box.expand(Vec3(1, 1, 1));
  const auto e = box.entry(Ray::make(Vec3(-2, 0.5, 0.5), Vec3(1, 0, 0)), 10.0);
  REQUIRE(e);
  CHECK(*e == doctest::Approx(2.0));
  CHECK_FALSE(box.entry(Ray::make(Vec3(-2, 0.5, 0.5), Vec3(1, 0, 0)), 1.0));
  CHECK_FALSE(box.entry(Ray::make(Vec3(-2, 2.5, 0.5), Vec3(1, 0, 0)), 10.0));
  const auto inside = box.entry(Ray::make(Vec3(0.5, 0.5, 0.5), Vec3(0, 0, 1)), 10.0);
  REQUIRE(inside);
  CHECK(*inside == 0.0);
  CHECK(default_group_count(10) == 1);
  CHECK(default_group_count(6400) == 100);
  CHECK(default_group_count(10'000'000) == 4096);
}
