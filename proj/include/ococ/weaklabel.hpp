#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "ococ/pointcloud.hpp"
#include "ococ/rng.hpp"

namespace ococ {

// Spherical subset of the training cloud; the training/query unit.
struct SubCloud {
  int id = 0;
  Vec3 center{0, 0, 0};
  double radius = 0.0;
  std::vector<int> members;  // ascending indices into the training cloud
  int cycle = 0;             // acquisition cycle
};

// One clicked point per class present in the sub-cloud.
struct OcocLabel {
  std::map<int, int> clicks;  // class id -> member point index (cloud index)
};

struct LabeledPool {
  struct Entry {
    SubCloud sub;
    OcocLabel label;
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
  long long total_clicks() const;
  // Clicks per class across the pool (M_c).
  std::vector<long long> click_counts(int class_count) const;
  // Scene multi-hot vector of one entry.
  static std::vector<double> multi_hot(const Entry& e, int class_count);
};

SubCloud extract_subcloud(const PointCloud& cloud, const SpatialIndex& index, const Vec3& center,
                          double r, int cycle, int id);

// One uniformly random click per ground-truth class present among members.
OcocLabel simulate_ococ_random(const SubCloud& sub, std::span<const int> gt, Rng& rng);

// Boundary decay b = 1 - exp(-r (r - d)).
double boundary_decay(double r, double d);

// Click saliency D' of Eq.-19 shape: neighborhood-homogeneous TOD mean times
// the boundary decay. tod holds one value per member, aligned with
// sub.members; gt indexes the full cloud; the k-nn graph (self included) is
// restricted to sub-cloud members.
std::vector<double> click_saliency(const SubCloud& sub, const PointCloud& cloud,
                                   std::span<const double> tod, std::span<const int> gt, int k);

// For each present class, click the member with maximal D' (ties -> smallest
// point index).
OcocLabel simulate_ococ_tod(const SubCloud& sub, const PointCloud& cloud,
                            std::span<const double> tod, std::span<const int> gt, int k);

// w_c = (1/sqrt(M_c)) / sum_i (1/sqrt(M_i)); classes without clicks get 0 and
// are excluded from the normalization.
std::vector<double> class_weights(const LabeledPool& pool, int class_count);

// Total clicks over the size of the (subsampled) training cloud.
double label_fraction(const LabeledPool& pool, std::size_t cloud_size);

// Pool <-> structured text (JSON), for resume and audit.
void save_pool(std::ostream& out, const LabeledPool& pool);
LabeledPool load_pool(std::istream& in);

}  // namespace ococ
