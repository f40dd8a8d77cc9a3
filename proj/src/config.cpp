#include "phir/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "phir/errors.hpp"

namespace phir {

namespace {

class Section {
 public:
  Section(const toml::table* t, std::string name) : t_(t), name_(std::move(name)) {}

  template <class T>
  void get(const char* key, T& out) {
    known_.insert(key);
    if (!t_) return;
    const toml::node* n = t_->get(key);
    if (!n) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = n->value_exact<bool>()) out = *v; else fail(key, "a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = n->value_exact<std::string>()) out = *v; else fail(key, "a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) out = *v;
      else fail(key, "a number");
    } else {
      if (auto v = n->value_exact<std::int64_t>()) {
        if (*v < 0 && std::is_unsigned_v<T>) fail(key, "a non-negative integer");
        out = static_cast<T>(*v);
      } else {
        fail(key, "an integer");
      }
    }
  }

  void allow(const char* key) { known_.insert(key); }

  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_)
      if (!known_.count(std::string(k.str())))
        throw ConfigurationError("unknown config key '" + qualified(std::string(k.str())) + "'");
  }

 private:
  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigurationError("config key '" + qualified(key) + "' must be " + what);
  }

  const toml::table* t_;
  std::string name_;
  std::set<std::string> known_;
};

const toml::table* sub(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigurationError(std::string("config section '") + name + "' must be a table");
  return n->as_table();
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::ostringstream out;
  out << toml::value<std::string>(s);
  return out.str();
}

}  // namespace

void PipelineConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigurationError(std::string("config: ") + what);
  };
  positive(fixture.kind == "torus" || fixture.kind == "voxel" || fixture.kind == "sphere",
           "fixture.kind must be torus, voxel, or sphere");
  positive(fixture.major_radius > fixture.minor_radius && fixture.minor_radius > 0.0,
           "fixture radii must satisfy major > minor > 0");
  positive(fixture.nu >= 3 && fixture.nv >= 3, "fixture.nu and fixture.nv must be >= 3");
  positive(fixture.holes >= 0 && fixture.resolution > 0 && fixture.sphere_levels >= 0,
           "fixture counts must be non-negative");
  positive(cameras.total > 0 && cameras.per_loop > 0, "camera counts must be positive");
  positive(cameras.distance_factor > 0.0 && cameras.radius > 0.0, "camera distances must be positive");
  positive(cameras.min_angle >= 0.0, "cameras.min_angle must be >= 0");
  positive(cameras.fov > 0.0 && cameras.fov < 180.0, "cameras.fov must lie in (0, 180)");
  positive(render.resolution > 0 && render.preview_resolution > 0, "render resolutions must be positive");
  positive(render.tau > 0.0, "render.tau must be positive");
  positive(optimize.w1 >= 0.0 && optimize.w2 >= 0.0, "optimize weights must be >= 0");
  positive(optimize.lr > 0.0 && optimize.lambda >= 0.0, "optimize.lr must be > 0 and lambda >= 0");
  positive(optimize.steps >= 0 && optimize.smooth_rounds >= 0 && optimize.checkpoint_every >= 0,
           "optimize counts must be non-negative");
  positive(metrics.samples > 0 && metrics.grid_res > 0, "metrics counts must be positive");
}

PipelineConfig parse_config(const std::string& toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    throw ParseError(msg.str());
  }
  PipelineConfig cfg;
  Section top(&root, "");
  for (const char* s : {"fixture", "input", "cameras", "render", "optimize", "metrics"}) top.allow(s);
  top.get("seed", cfg.seed);
  top.finish();

  Section fx(sub(root, "fixture"), "fixture");
  fx.get("kind", cfg.fixture.kind);
  fx.get("major_radius", cfg.fixture.major_radius);
  fx.get("minor_radius", cfg.fixture.minor_radius);
  fx.get("nu", cfg.fixture.nu);
  fx.get("nv", cfg.fixture.nv);
  fx.get("holes", cfg.fixture.holes);
  fx.get("resolution", cfg.fixture.resolution);
  fx.get("sphere_levels", cfg.fixture.sphere_levels);
  fx.finish();

  Section in(sub(root, "input"), "input");
  in.get("mesh", cfg.input.mesh);
  in.get("interior", cfg.input.interior);
  in.get("exterior", cfg.input.exterior);
  in.get("name", cfg.input.name);
  in.finish();

  Section cam(sub(root, "cameras"), "cameras");
  cam.get("total", cfg.cameras.total);
  cam.get("per_loop", cfg.cameras.per_loop);
  cam.get("distance_factor", cfg.cameras.distance_factor);
  cam.get("min_angle", cfg.cameras.min_angle);
  cam.get("radius", cfg.cameras.radius);
  cam.get("fov", cfg.cameras.fov);
  cam.finish();

  Section rd(sub(root, "render"), "render");
  rd.get("resolution", cfg.render.resolution);
  rd.get("tau", cfg.render.tau);
  rd.get("preview_resolution", cfg.render.preview_resolution);
  rd.finish();

  Section op(sub(root, "optimize"), "optimize");
  op.get("w1", cfg.optimize.w1);
  op.get("w2", cfg.optimize.w2);
  op.get("lr", cfg.optimize.lr);
  op.get("steps", cfg.optimize.steps);
  op.get("precondition", cfg.optimize.precondition);
  op.get("lambda", cfg.optimize.lambda);
  op.get("smooth_rounds", cfg.optimize.smooth_rounds);
  op.get("checkpoint_every", cfg.optimize.checkpoint_every);
  op.finish();

  Section mt(sub(root, "metrics"), "metrics");
  mt.get("samples", cfg.metrics.samples);
  mt.get("grid_res", cfg.metrics.grid_res);
  mt.finish();

  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_toml(const PipelineConfig& c) {
  std::ostringstream o;
  o << "seed = " << c.seed << "\n\n";
  o << "[fixture]\n"
    << "kind = " << quoted(c.fixture.kind) << "\n"
    << "major_radius = " << num(c.fixture.major_radius) << "\n"
    << "minor_radius = " << num(c.fixture.minor_radius) << "\n"
    << "nu = " << c.fixture.nu << "\n"
    << "nv = " << c.fixture.nv << "\n"
    << "holes = " << c.fixture.holes << "\n"
    << "resolution = " << c.fixture.resolution << "\n"
    << "sphere_levels = " << c.fixture.sphere_levels << "\n\n";
  o << "[input]\n"
    << "mesh = " << quoted(c.input.mesh) << "\n"
    << "interior = " << quoted(c.input.interior) << "\n"
    << "exterior = " << quoted(c.input.exterior) << "\n"
    << "name = " << quoted(c.input.name) << "\n\n";
  o << "[cameras]\n"
    << "total = " << c.cameras.total << "\n"
    << "per_loop = " << c.cameras.per_loop << "\n"
    << "distance_factor = " << num(c.cameras.distance_factor) << "\n"
    << "min_angle = " << num(c.cameras.min_angle) << "\n"
    << "radius = " << num(c.cameras.radius) << "\n"
    << "fov = " << num(c.cameras.fov) << "\n\n";
  o << "[render]\n"
    << "resolution = " << c.render.resolution << "\n"
    << "tau = " << num(c.render.tau) << "\n"
    << "preview_resolution = " << c.render.preview_resolution << "\n\n";
  o << "[optimize]\n"
    << "w1 = " << num(c.optimize.w1) << "\n"
    << "w2 = " << num(c.optimize.w2) << "\n"
    << "lr = " << num(c.optimize.lr) << "\n"
    << "steps = " << c.optimize.steps << "\n"
    << "precondition = " << (c.optimize.precondition ? "true" : "false") << "\n"
    << "lambda = " << num(c.optimize.lambda) << "\n"
    << "smooth_rounds = " << c.optimize.smooth_rounds << "\n"
    << "checkpoint_every = " << c.optimize.checkpoint_every << "\n\n";
  o << "[metrics]\n"
    << "samples = " << c.metrics.samples << "\n"
    << "grid_res = " << c.metrics.grid_res << "\n";
  return o.str();
}

}  // namespace phir
