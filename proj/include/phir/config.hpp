#pragma once

#include <cstdint>
#include <string>

namespace phir {

struct PipelineConfig {
  struct Fixture {
    std::string kind = "torus";  // torus | voxel | sphere
    double major_radius = 2.0;
    double minor_radius = 0.6;
    int nu = 12;
    int nv = 32;
    int holes = 2;
    int resolution = 12;
    int sphere_levels = 2;
  } fixture;

  // Ground truth from files instead of a generated fixture. `interior` and
  // `exterior` are TetGen path prefixes (.node/.ele).
  struct Input {
    std::string mesh;
    std::string interior;
    std::string exterior;
    std::string name;
  } input;

  struct Cameras {
    int total = 24;  // views per strategy
    int per_loop = 4;
    double distance_factor = 6.0;
    double min_angle = 10.0;
    double radius = 2.5;
    double fov = 40.0;
  } cameras;

  struct Render {
    int resolution = 64;
    double tau = 1.0;
    int preview_resolution = 256;
  } render;

  struct Optimize {
    double w1 = 1e-2;
    double w2 = 1.0;
    double lr = 1e-3;
    int steps = 600;
    bool precondition = false;
    double lambda = 19.0;
    int smooth_rounds = 20;
    int checkpoint_every = 100;
  } optimize;

  struct Metrics {
    int samples = 20000;
    int grid_res = 128;
  } metrics;

  std::uint64_t seed = 1;

  // Throws ConfigurationError on non-positive counts or negative weights.
  void validate() const;
};

// Unknown keys are rejected so typos do not pass silently.
PipelineConfig parse_config(const std::string& toml_text, const std::string& source = "config");
PipelineConfig load_config(const std::string& path);
std::string config_toml(const PipelineConfig& cfg);

}  // namespace phir
