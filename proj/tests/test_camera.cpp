#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "phir/camera.hpp"
#include "phir/errors.hpp"
#include "phir/fixtures.hpp"

using namespace phir;

namespace {

LoopCycle circle_loop(int n) {
  LoopCycle l;
  l.kind = LoopKind::tunnel;
  for (int i = 0; i < n; ++i) l.vertex_sequence.push_back(i);
  return l;
}

TriMesh circle_mesh(int n, const std::function<Vec3(Vec3)>& map) {
  TriMesh m;
  for (int i = 0; i < n; ++i)
    m.vertices.push_back(map({std::cos(2 * M_PI * i / n), std::sin(2 * M_PI * i / n), 0.0}));
  return m;
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(dot(normalize(a), normalize(b)), -1.0, 1.0)) * 180.0 / M_PI;
}

Vec3 rotate(const Vec3& p) {
  // 30 degrees about x, then 50 degrees about z.
  const double a = M_PI / 6, b = 5 * M_PI / 18;
  const Vec3 q{p.x, std::cos(a) * p.y - std::sin(a) * p.z, std::sin(a) * p.y + std::cos(a) * p.z};
  return {std::cos(b) * q.x - std::sin(b) * q.y, std::sin(b) * q.x + std::cos(b) * q.y, q.z};
}

}  // namespace

TEST_CASE("camera validation") {
  Camera c{{0, 0, 5}, {0, 0, 0}, {0, 1, 0}};
  CHECK_NOTHROW(c.validate());
  Camera same = c;
  same.look_at = same.position;
  CHECK_THROWS_AS(same.validate(), ArgumentError);
  Camera par = c;
  par.up = {0, 0, 1};
  CHECK_THROWS_AS(par.validate(), ArgumentError);
  Camera wide = c;
  wide.fov = 180;
  CHECK_THROWS_AS(wide.validate(), ArgumentError);
  const CameraBasis b = camera_basis(c);
  CHECK(std::abs(dot(b.right, b.up)) < 1e-15);
  CHECK(std::abs(dot(b.up, b.forward)) < 1e-15);
}

TEST_CASE("Fibonacci sphere cameras") {
  const auto one = uniform_sphere_cameras(1, 2.0, {0, 0, 0});
  REQUIRE(one.size() == 1);
  CHECK(distance(one[0].position, Vec3{0, 0, 2.0}) < 1e-12);
  CHECK_NOTHROW(one[0].validate());
  const Vec3 c{0.5, 0.5, 0.5};
  const auto cams = uniform_sphere_cameras(100, 2.5, c);
  REQUIRE(cams.size() == 100);
  double min_sep = M_PI;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    CHECK(std::abs(distance(cams[i].position, c) - 2.5) < 1e-12);
    CHECK(cams[i].look_at == c);
    CHECK_NOTHROW(cams[i].validate());
    for (std::size_t j = 0; j < i; ++j)
      min_sep = std::min(min_sep, angle_deg(cams[i].position - c, cams[j].position - c) * M_PI / 180.0);
  }
  // Hexagonal packing of n caps: each covers ~4 pi / n steradians.
  const double ideal = std::sqrt(8.0 * M_PI / (std::sqrt(3.0) * 100));
  CHECK(min_sep >= 0.8 * ideal);
}

TEST_CASE("loop frame of a planar circle") {
  const TriMesh m = circle_mesh(12, [](Vec3 p) { return p; });
  const LoopFrame f = loop_frame(circle_loop(12), m);
  CHECK(norm(f.centroid) < 1e-12);
  CHECK(std::abs(std::abs(f.normal.z) - 1.0) < 1e-12);
  CHECK(f.radius == doctest::Approx(1.0));
  CHECK(std::abs(dot(f.reference, f.normal)) < 1e-12);

  const TriMesh r = circle_mesh(12, rotate);
  const LoopFrame g = loop_frame(circle_loop(12), r);
  CHECK(norm(g.centroid) < 1e-12);
  CHECK(std::abs(std::abs(dot(g.normal, rotate({0, 0, 1}))) - 1.0) < 1e-9);

  TriMesh line;
  for (int i = 0; i < 4; ++i) line.vertices.push_back({double(i), 0, 0});
  CHECK_THROWS_AS(loop_frame(circle_loop(4), line), ArgumentError);
}

TEST_CASE("torus tunnel normal follows the axis") {
  const TriMesh m = make_torus(2.0, 0.6, 8, 24);
  LoopCycle l;
  l.kind = LoopKind::tunnel;
  for (int j = 0; j < 24; ++j) l.vertex_sequence.push_back(j * 8 + 2);
  const LoopFrame f = loop_frame(l, m);
  CHECK(std::min(angle_deg(f.normal, {0, 0, 1}), angle_deg(f.normal, {0, 0, -1})) < 5.0);
}

TEST_CASE("guided cameras") {
  const TriMesh m = circle_mesh(12, [](Vec3 p) { return p; });
  const auto two = ph_guided_cameras({circle_loop(12)}, m, 2, 6.0);
  REQUIRE(two.size() == 2);
  for (const auto& c : two) {
    CHECK(norm(c.look_at) < 1e-12);
    CHECK(std::abs(std::abs(c.forward().z) - 1.0) < 1e-12);
    CHECK(distance(c.position, c.look_at) == doctest::Approx(6.0));
  }
  const auto four = ph_guided_cameras({circle_loop(12)}, m, 4, 6.0);
  REQUIRE(four.size() == 4);
  for (std::size_t k = 2; k < 4; ++k) {
    const Vec3 dir = four[k].position - four[k].look_at;
    CHECK(std::min(angle_deg(dir, {0, 0, 1}), angle_deg(dir, {0, 0, -1})) == doctest::Approx(35.0));
    // The view ray passes through the centroid.
    const Vec3 p = four[k].position;
    const Vec3 d = four[k].forward();
    CHECK(norm(cross(Vec3{0, 0, 0} - p, d)) < 1e-9);
  }
  LoopCycle handle = circle_loop(12);
  handle.kind = LoopKind::handle;
  CHECK(ph_guided_cameras({handle}, m, 4, 6.0).empty());
  CHECK(ph_guided_cameras({}, m, 4, 6.0).empty());
  CHECK_THROWS_AS(ph_guided_cameras({circle_loop(12)}, m, 0, 6.0), ArgumentError);
}

TEST_CASE("guided cameras are rigidly equivariant") {
  const TriMesh m = circle_mesh(12, [](Vec3 p) { return p; });
  const TriMesh r = circle_mesh(12, rotate);
  const auto a = ph_guided_cameras({circle_loop(12)}, m, 4, 6.0);
  const auto b = ph_guided_cameras({circle_loop(12)}, r, 4, 6.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(distance(rotate(a[k].position), b[k].position) < 1e-9);
    CHECK(distance(rotate(a[k].look_at), b[k].look_at) < 1e-9);
    CHECK(distance(rotate(camera_basis(a[k]).up), camera_basis(b[k]).up) < 1e-9);
  }
}

TEST_CASE("guided cameras inside the solid are pushed out") {
  const TriMesh m = make_torus(2.0, 0.6, 8, 24);
  LoopCycle l;
  l.kind = LoopKind::tunnel;
  for (int j = 0; j < 24; ++j) l.vertex_sequence.push_back(j * 8 + 2);
  const auto cams = ph_guided_cameras({l}, m, 4, 0.2);
  REQUIRE(cams.size() == 4);
  for (const auto& c : cams) CHECK_FALSE(point_inside(m, c.position));
}

TEST_CASE("collaborative merge") {
  const auto u = uniform_sphere_cameras(10, 2.0, {0, 0, 0});
  CHECK(merge_collaborative(u, {}, 10).size() == u.size());
  const auto same = merge_collaborative(u, {u[3]}, 1.0);
  CHECK(same.size() == u.size());
  CHECK(same.front().position == u[3].position);
  std::vector<Camera> g{Camera{{0, 0, -5}, {0, 0, 0}, {0, 1, 0}}};
  const auto merged = merge_collaborative(u, g, 0.1);
  CHECK(merged.size() == u.size() + 1);
}

TEST_CASE("camera JSON round trip") {
  const auto cams = uniform_sphere_cameras(5, 2.0, {0.5, 0.5, 0.5}, {35.0, 48, 32});
  const auto back = parse_cameras_json(cameras_json(cams));
  REQUIRE(back.size() == cams.size());
  for (std::size_t k = 0; k < cams.size(); ++k) {
    CHECK(back[k].position == cams[k].position);
    CHECK(back[k].up == cams[k].up);
    CHECK(back[k].fov == 35.0);
    CHECK(back[k].width == 48);
    CHECK(back[k].height == 32);
  }
  CHECK_THROWS(parse_cameras_json("[{\"position\": [0, 0]}]"));
}
