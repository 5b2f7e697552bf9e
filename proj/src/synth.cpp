#include "ococ/synth.hpp"

#include <algorithm>
#include <cmath>

#include "ococ/rng.hpp"

namespace ococ::synth {

const char* const kClassNames[kClassCount] = {"ground", "building", "tree", "car", "pole"};

namespace {

constexpr double kPi = 3.14159265358979323846;

// Base pseudo-colors; pole is deliberately close to ground so color alone
// does not separate the classes.
constexpr double kBaseColor[kClassCount][3] = {
    {0.45, 0.42, 0.35},  // ground
    {0.58, 0.36, 0.30},  // building
    {0.22, 0.48, 0.22},  // tree
    {0.30, 0.32, 0.58},  // car
    {0.40, 0.39, 0.36},  // pole
};

struct Builder {
  const SceneConfig& cfg;
  Rng noise_rng;
  Rng color_rng;
  PointCloud cloud;

  explicit Builder(const SceneConfig& c)
      : cfg(c), noise_rng(Rng(c.seed).fork(101)), color_rng(Rng(c.seed).fork(102)) {
    cloud.feature_dim = 3;
    cloud.class_count = kClassCount;
  }

  double truncated_noise() {
    const double v = noise_rng.normal() * cfg.noise_sigma;
    return std::clamp(v, -3.0 * cfg.noise_sigma, 3.0 * cfg.noise_sigma);
  }

  void add(double x, double y, double z, int label) {
    cloud.positions.push_back({x + truncated_noise(), y + truncated_noise(),
                               z + truncated_noise()});
    for (int c = 0; c < 3; ++c) {
      const double v = kBaseColor[label][c] + color_rng.normal() * cfg.color_noise;
      cloud.features.push_back(std::clamp(v, 0.0, 1.0));
    }
    cloud.labels.push_back(label);
  }
};

void add_ground(Builder& b, Rng& rng) {
  const int nx = static_cast<int>(std::llround(b.cfg.extent_x * std::sqrt(b.cfg.density)));
  const int ny = static_cast<int>(std::llround(b.cfg.extent_y * std::sqrt(b.cfg.density)));
  if (nx < 1 || ny < 1) return;
  const double sx = b.cfg.extent_x / nx;
  const double sy = b.cfg.extent_y / ny;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double x = (i + 0.5) * sx + rng.uniform(-0.45, 0.45) * sx;
      const double y = (j + 0.5) * sy + rng.uniform(-0.45, 0.45) * sy;
      // Gentle undulation so the ground is not a perfect plane.
      const double z = 0.15 * std::sin(0.21 * x) * std::cos(0.17 * y);
      b.add(x, y, z, kGround);
    }
  }
}

// Uniform point on the shell of an axis-aligned box (4 walls + top, no floor).
void add_box_shell(Builder& b, Rng& rng, double cx, double cy, double w, double l, double h,
                   double z0, int label, double density) {
  const double wall_area = 2.0 * (w + l) * h;
  const double top_area = w * l;
  const long n = std::lround((wall_area + top_area) * density);
  for (long i = 0; i < n; ++i) {
    const double pick = rng.uniform(0.0, wall_area + top_area);
    double x, y, z;
    if (pick < top_area) {
      x = cx + rng.uniform(-0.5, 0.5) * w;
      y = cy + rng.uniform(-0.5, 0.5) * l;
      z = z0 + h;
    } else {
      const double t = rng.uniform(0.0, 2.0 * (w + l));
      z = z0 + rng.uniform(0.0, 1.0) * h;
      if (t < w) {
        x = cx - 0.5 * w + t;
        y = cy - 0.5 * l;
      } else if (t < w + l) {
        x = cx + 0.5 * w;
        y = cy - 0.5 * l + (t - w);
      } else if (t < 2.0 * w + l) {
        x = cx + 0.5 * w - (t - w - l);
        y = cy + 0.5 * l;
      } else {
        x = cx - 0.5 * w;
        y = cy + 0.5 * l - (t - 2.0 * w - l);
      }
    }
    b.add(x, y, z, label);
  }
}

void add_cylinder(Builder& b, Rng& rng, double cx, double cy, double radius, double z0, double h,
                  int label, double density) {
  const long n = std::max(1L, std::lround(2.0 * kPi * radius * h * density));
  for (long i = 0; i < n; ++i) {
    const double a = rng.uniform(0.0, 2.0 * kPi);
    b.add(cx + radius * std::cos(a), cy + radius * std::sin(a), z0 + rng.uniform(0.0, 1.0) * h,
          label);
  }
}

void add_sphere(Builder& b, Rng& rng, double cx, double cy, double cz, double radius, int label,
                double density) {
  const long n = std::max(1L, std::lround(4.0 * kPi * radius * radius * density));
  for (long i = 0; i < n; ++i) {
    const double z = rng.uniform(-1.0, 1.0);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    b.add(cx + radius * rxy * std::cos(a), cy + radius * rxy * std::sin(a), cz + radius * z,
          label);
  }
}

// Object center with enough margin that the footprint stays inside the extent.
void place(Rng& rng, const SceneConfig& cfg, double margin, double& cx, double& cy) {
  const double mx = std::min(margin, 0.45 * cfg.extent_x);
  const double my = std::min(margin, 0.45 * cfg.extent_y);
  cx = rng.uniform(mx, cfg.extent_x - mx);
  cy = rng.uniform(my, cfg.extent_y - my);
}

}  // namespace

PointCloud generate_scene(const SceneConfig& cfg) {
  if (!(cfg.extent_x > 0.0) || !(cfg.extent_y > 0.0)) throw Error("scene extent must be positive");
  if (!(cfg.density > 0.0)) throw Error("scene density must be positive");

  Builder b(cfg);
  Rng root(cfg.seed);

  Rng ground_rng = root.fork(1);
  add_ground(b, ground_rng);
  if (b.cloud.positions.empty()) {
    throw Error("scene has no points: at least the ground class is required");
  }

  Rng obj = root.fork(2);
  const double od = cfg.object_density;
  for (int i = 0; i < cfg.buildings; ++i) {
    const double w = obj.uniform(6.0, 12.0), l = obj.uniform(6.0, 12.0);
    const double h = obj.uniform(5.0, 10.0);
    double cx, cy;
    place(obj, cfg, 0.5 * std::max(w, l), cx, cy);
    add_box_shell(b, obj, cx, cy, std::min(w, 0.8 * cfg.extent_x), std::min(l, 0.8 * cfg.extent_y),
                  h, 0.0, kBuilding, od);
  }
  for (int i = 0; i < cfg.trees; ++i) {
    const double trunk_r = obj.uniform(0.12, 0.3), trunk_h = obj.uniform(2.0, 4.0);
    const double crown_r = obj.uniform(1.2, 2.5);
    double cx, cy;
    place(obj, cfg, crown_r, cx, cy);
    add_cylinder(b, obj, cx, cy, trunk_r, 0.0, trunk_h, kTree, od);
    add_sphere(b, obj, cx, cy, trunk_h + 0.6 * crown_r, crown_r, kTree, 0.7 * od);
  }
  for (int i = 0; i < cfg.cars; ++i) {
    const double w = obj.uniform(1.6, 2.0), l = obj.uniform(3.8, 4.6);
    const double h = obj.uniform(1.3, 1.7);
    double cx, cy;
    place(obj, cfg, 0.5 * l, cx, cy);
    add_box_shell(b, obj, cx, cy, w, l, h, 0.0, kCar, od);
  }
  for (int i = 0; i < cfg.poles; ++i) {
    const double r = obj.uniform(0.04, 0.08), h = obj.uniform(4.0, 8.0);
    double cx, cy;
    place(obj, cfg, 0.5, cx, cy);
    // Denser sampling along the pole so it is visible at all; still a
    // marginal class by total count.
    add_cylinder(b, obj, cx, cy, r, 0.0, h, kPole, 6.0 * od);
  }

  b.cloud.validate();
  return std::move(b.cloud);
}

SceneManifest scene_manifest(const PointCloud& cloud, const SceneConfig& cfg) {
  SceneManifest m;
  m.seed = cfg.seed;
  m.total = static_cast<long long>(cloud.size());
  for (int l : cloud.labels) ++m.class_counts[l];
  return m;
}

}  // namespace ococ::synth
