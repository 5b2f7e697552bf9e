#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "ococ/pointcloud.hpp"

namespace ococ::synth {

// Class ids of the generated urban scenes.
enum SceneClass : int { kGround = 0, kBuilding = 1, kTree = 2, kCar = 3, kPole = 4 };
constexpr int kClassCount = 5;
extern const char* const kClassNames[kClassCount];

struct SceneConfig {
  double extent_x = 60.0;  // meters
  double extent_y = 60.0;
  double density = 50.0;          // ground points per m^2
  double object_density = 12.5;   // object surface points per m^2
  int buildings = 6;
  int trees = 12;
  int cars = 8;
  int poles = 10;
  double noise_sigma = 0.02;  // position noise, truncated at 3 sigma
  double color_noise = 0.15;
  std::uint64_t seed = 1;
};

struct SceneManifest {
  std::uint64_t seed = 0;
  std::array<long long, kClassCount> class_counts{};
  long long total = 0;
};

// Deterministic labeled scene: noisy ground grid, box-shell buildings and
// cars, trunk+crown trees, thin vertical poles. Identical seed, identical
// cloud; features are per-class pseudo-colors with additive noise.
PointCloud generate_scene(const SceneConfig& config);

SceneManifest scene_manifest(const PointCloud& cloud, const SceneConfig& config);

}  // namespace ococ::synth
