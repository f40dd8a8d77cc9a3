#include "phir/camera.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "phir/errors.hpp"

namespace phir {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kConeHalfAngle = 35.0;

Vec3 pick_up(const Vec3& forward, const Vec3& preferred) {
  if (norm(cross(forward, preferred)) > 1e-6) return preferred;
  return Vec3{1.0, 0.0, 0.0};
}

Vec3 orthogonal_part(const Vec3& v, const Vec3& n) { return normalize(v - n * dot(v, n)); }

// Largest t with origin + t*dir inside the box (origin inside).
double box_exit(const Aabb& box, const Vec3& origin, const Vec3& dir) {
  double t = HUGE_VAL;
  for (int k = 0; k < 3; ++k) {
    if (dir[k] > 0.0) t = std::min(t, (box.hi[k] - origin[k]) / dir[k]);
    if (dir[k] < 0.0) t = std::min(t, (box.lo[k] - origin[k]) / dir[k]);
  }
  return t;
}

}  // namespace

void Camera::validate() const {
  const Vec3 d = look_at - position;
  if (!(norm(d) > 0.0)) throw ArgumentError("camera position equals look_at");
  if (!(norm(cross(normalize(d), normalize(up))) > 1e-9))
    throw ArgumentError("camera up vector is parallel to the view direction");
  if (!(fov > 0.0 && fov < 180.0)) throw ArgumentError("camera fov must lie in (0, 180)");
  if (width <= 0 || height <= 0) throw ArgumentError("camera resolution must be positive");
}

double Camera::focal() const { return 0.5 * height / std::tan(0.5 * fov * kDeg); }

CameraBasis camera_basis(const Camera& cam) {
  CameraBasis b;
  b.forward = cam.forward();
  b.right = normalize(cross(b.forward, cam.up));
  b.up = cross(b.right, b.forward);
  return b;
}

std::vector<Camera> uniform_sphere_cameras(int n, double radius, const Vec3& center,
                                           const CameraLens& lens) {
  if (n < 1) throw ArgumentError("uniform_sphere_cameras: n must be >= 1");
  if (!(radius > 0.0)) throw ArgumentError("uniform_sphere_cameras: radius must be > 0");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Camera> cams;
  cams.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec3 dir{0.0, 0.0, 1.0};
    if (n > 1) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      dir = {r * std::cos(phi), r * std::sin(phi), z};
    }
    Camera c;
    c.position = center + dir * radius;
    c.look_at = center;
    c.up = pick_up(-dir, Vec3{0.0, 0.0, 1.0});
    c.fov = lens.fov;
    c.width = lens.width;
    c.height = lens.height;
    cams.push_back(c);
  }
  return cams;
}

LoopFrame loop_frame(const LoopCycle& loop, const TriMesh& mesh) {
  const auto& seq = loop.vertex_sequence;
  if (seq.size() < 3) throw ArgumentError("loop_frame: loop needs at least 3 vertices");
  LoopFrame fr;
  for (int v : seq) fr.centroid += mesh.vertices.at(v);
  fr.centroid = fr.centroid / static_cast<double>(seq.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int v : seq) {
    const Vec3 d = mesh.vertices[v] - fr.centroid;
    Eigen::Vector3d e(d.x, d.y, d.z);
    cov += e * e.transpose();
    fr.radius += norm(d);
  }
  fr.radius /= static_cast<double>(seq.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const auto& ev = eig.eigenvalues();
  if (!(ev(1) > 1e-12 * std::max(ev(2), 1e-300)) || !(fr.radius > 0.0))
    throw ArgumentError("loop_frame: degenerate (collinear) loop");
  const Eigen::Vector3d n = eig.eigenvectors().col(0);
  fr.normal = normalize(Vec3{n(0), n(1), n(2)});

  const int plus = ray_crossings(mesh, fr.centroid, fr.normal);
  const int minus = ray_crossings(mesh, fr.centroid, -fr.normal);
  bool flip = minus < plus;
  if (plus == minus) {
    Vec3 mesh_centroid;
    for (const auto& p : mesh.vertices) mesh_centroid += p;
    mesh_centroid = mesh_centroid / static_cast<double>(std::max<std::size_t>(1, mesh.vertices.size()));
    const double s = dot(fr.centroid - mesh_centroid, fr.normal);
    const double scale = std::max(fr.radius, 1e-300);
    if (std::abs(s) > 1e-9 * scale) {
      flip = s < 0.0;
    } else {
      int k = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(fr.normal[i]) > std::abs(fr.normal[k])) k = i;
      flip = fr.normal[k] < 0.0;
    }
  }
  if (flip) fr.normal = -fr.normal;
  fr.reference = orthogonal_part(mesh.vertices[seq[0]] - fr.centroid, fr.normal);
  return fr;
}

std::vector<Camera> ph_guided_cameras(const std::vector<LoopCycle>& loops, const TriMesh& mesh,
                                      int per_loop, double distance_factor,
                                      const CameraLens& lens) {
  if (per_loop < 1) throw ArgumentError("ph_guided_cameras: per_loop must be >= 1");
  if (!(distance_factor > 0.0)) throw ArgumentError("ph_guided_cameras: distance_factor must be > 0");
  std::vector<Camera> cams;
  const Aabb box = mesh.bounds();
  const double margin = 1e-3 * norm(box.extent());
  for (const auto& loop : loops) {
    if (loop.kind != LoopKind::tunnel) continue;
    const LoopFrame fr = loop_frame(loop, mesh);
    const double dist = distance_factor * fr.radius;
    const Vec3 side = cross(fr.normal, fr.reference);
    std::vector<std::pair<Vec3, Vec3>> views;  // (direction from centroid, up)
    views.emplace_back(fr.normal, fr.reference);
    if (per_loop >= 2) views.emplace_back(-fr.normal, fr.reference);
    const int cone = per_loop - 2;
    for (int k = 0; k < cone; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / cone;
      const double a = kConeHalfAngle * kDeg;
      const Vec3 dir = fr.normal * std::cos(a) +
                       (fr.reference * std::cos(phi) + side * std::sin(phi)) * std::sin(a);
      views.emplace_back(dir, fr.normal);
    }
    for (const auto& [dir, up] : views) {
      Camera c;
      c.look_at = fr.centroid;
      c.position = fr.centroid + dir * dist;
      if (point_inside(mesh, c.position))
        c.position = fr.centroid + dir * (box_exit(box, fr.centroid, dir) + margin);
      c.up = orthogonal_part(up, dir);
      c.fov = lens.fov;
      c.width = lens.width;
      c.height = lens.height;
      cams.push_back(c);
    }
  }
  return cams;
}

std::vector<Camera> merge_collaborative(const std::vector<Camera>& uniform,
                                        const std::vector<Camera>& guided, double min_angle) {
  std::vector<Camera> out = guided;
  const double cos_limit = std::cos(min_angle * kDeg);
  for (const auto& u : uniform) {
    const Vec3 du = normalize(u.position - u.look_at);
    bool keep = true;
    for (const auto& g : guided) {
      const Vec3 dg = normalize(g.position - u.look_at);
      if (dot(du, dg) >= cos_limit) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(u);
  }
  return out;
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const nlohmann::json& j, const char* field) {
  if (!j.is_array() || j.size() != 3) throw ParseError(std::string("camera field '") + field + "' must be a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string cameras_json(const std::vector<Camera>& cams) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cams)
    arr.push_back({{"position", vec_json(c.position)},
                   {"look_at", vec_json(c.look_at)},
                   {"up", vec_json(c.up)},
                   {"fov", c.fov},
                   {"resolution", {c.width, c.height}}});
  return arr.dump(2);
}

std::vector<Camera> parse_cameras_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("camera JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ParseError("camera JSON must be a list");
  std::vector<Camera> cams;
  for (const auto& j : arr) {
    for (const char* key : {"position", "look_at", "up", "fov", "resolution"})
      if (!j.contains(key)) throw ParseError(std::string("camera JSON: missing '") + key + "'");
    Camera c;
    c.position = json_vec(j["position"], "position");
    c.look_at = json_vec(j["look_at"], "look_at");
    c.up = json_vec(j["up"], "up");
    c.fov = j["fov"].get<double>();
    const auto& r = j["resolution"];
    if (!r.is_array() || r.size() != 2) throw ParseError("camera JSON: resolution must be [w, h]");
    c.width = r[0].get<int>();
    c.height = r[1].get<int>();
    c.validate();
    cams.push_back(c);
  }
  return cams;
}

void save_cameras(const std::vector<Camera>& cams, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << cameras_json(cams) << '\n';
}

std::vector<Camera> load_cameras(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cameras_json(ss.str());
}

}  // namespace phir
