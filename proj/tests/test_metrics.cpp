#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "phir/errors.hpp"
#include "phir/fixtures.hpp"
#include "phir/metrics.hpp"

using namespace phir;

namespace {

double brute_nearest(const std::vector<Vec3>& pts, const Vec3& q) {
  double best = HUGE_VAL;
  for (const Vec3& p : pts) {
    const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
    best = std::min(best, dx * dx + dy * dy + dz * dz);
  }
  return best;
}

double brute_chamfer(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t seed) {
  const auto pa = sample_surface(a, n, seed);
  const auto pb = sample_surface(b, n, seed);
  double sa = 0.0, sb = 0.0;
  for (const auto& p : pa) sa += std::sqrt(brute_nearest(pb, p));
  for (const auto& p : pb) sb += std::sqrt(brute_nearest(pa, p));
  return 0.5 * (sa / static_cast<double>(n) + sb / static_cast<double>(n));
}

TriMesh unit_square(double z) {
  TriMesh m;
  m.vertices = {{0, 0, z}, {1, 0, z}, {1, 1, z}, {0, 1, z}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

}  // namespace

TEST_CASE("PointGrid equals a linear scan") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::vector<Vec3> pts(700);
  for (auto& p : pts) p = {u(rng), u(rng) * 0.1, u(rng)};
  const PointGrid grid(pts);
  for (int q = 0; q < 300; ++q) {
    const Vec3 x{u(rng) * 2, u(rng), u(rng)};
    CHECK(grid.nearest_sq(x) == brute_nearest(pts, x));
  }
  CHECK_THROWS_AS(PointGrid(std::vector<Vec3>{}), ArgumentError);
}

TEST_CASE("grid chamfer equals brute force") {
  const TriMesh a = make_torus(0.35, 0.1, 12, 24);
  const TriMesh b = make_icosphere(2);
  CHECK(chamfer(a, b, 500, 3) == brute_chamfer(a, b, 500, 3));
  CHECK(chamfer(a, b, 500, 3) == chamfer(b, a, 500, 3));
}

TEST_CASE("chamfer identities and limits") {
  const TriMesh a = make_icosphere(2);
  CHECK(chamfer(a, a, 1000, 5) == 0.0);
  CHECK(chamfer(unit_square(0.0), unit_square(0.1), 100000, 1) == doctest::Approx(0.1).epsilon(0.02));
  CHECK_THROWS_AS(chamfer(TriMesh{}, a, 10, 1), ArgumentError);
  CHECK_THROWS_AS(chamfer(a, a, 0, 1), ArgumentError);
}

TEST_CASE("volume IoU of boxes") {
  const TriMesh a = testing::box_mesh({0, 0, 0}, {1, 1, 1});
  const TriMesh b = testing::box_mesh({0.5, 0, 0}, {1, 1, 1});
  CHECK(volume_iou(a, a, 32) == 1.0);
  CHECK(volume_iou(a, b, 128) == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  CHECK(volume_iou(a, b, 128) == volume_iou(b, a, 128));
  const TriMesh c = testing::box_mesh({3, 0, 0}, {1, 1, 1});
  CHECK(volume_iou(a, c, 32) == 0.0);
  TriMesh open = a;
  open.faces.pop_back();
  CHECK_THROWS_AS(volume_iou(open, a, 16), TopologyError);
}

TEST_CASE("voxelize handles rays through shared edges") {
  const TriMesh a = testing::box_mesh({0, 0, 0}, {1, 1, 1});
  Aabb box;
  box.expand({0, 0, 0});
  box.expand({1, 1, 1});
  // Rows at y = z = 0.25 and 0.75 run through the diagonals of the x faces.
  const auto v = voxelize(a, box, 2);
  int inside = 0;
  for (char c : v) inside += c;
  CHECK(inside == 8);
}

TEST_CASE("volume IoU is invariant under a shared translation") {
  const TriMesh s = make_icosphere(2);
  TriMesh t = s;
  for (auto& p : t.vertices) p += Vec3{0.3, 0.1, 0.0};
  const double base = volume_iou(s, t, 48);
  TriMesh s2 = s, t2 = t;
  for (auto& p : s2.vertices) p += Vec3{2.0, -1.0, 0.5};
  for (auto& p : t2.vertices) p += Vec3{2.0, -1.0, 0.5};
  CHECK(volume_iou(s2, t2, 48) == doctest::Approx(base).epsilon(1e-9));
  CHECK(base > 0.5);
  CHECK(base < 1.0);
}
