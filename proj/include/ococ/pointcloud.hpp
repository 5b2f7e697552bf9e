#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ococ/common.hpp"

namespace ococ {

// Point cloud with positions in meters, an optional per-point feature block
// (row-major, feature_dim columns) and optional class labels in [0, class_count).
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<double> features;  // size() == positions.size() * feature_dim
  std::vector<int> labels;       // empty when absent
  int feature_dim = 0;
  int class_count = 0;

  std::size_t size() const { return positions.size(); }
  bool has_labels() const { return !labels.empty(); }
  std::span<const double> feature(std::size_t i) const {
    return {features.data() + i * static_cast<std::size_t>(feature_dim),
            static_cast<std::size_t>(feature_dim)};
  }
  // Throws Error when the length/label invariants are broken.
  void validate() const;
};

struct Neighbor {
  int index;
  double distance;
};

// Immutable k-d tree over a fixed set of positions. Queries are safe to run
// concurrently. knn results are sorted by (distance, index); ties on distance
// always resolve to the lower point index, matching the brute-force oracle.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const Vec3> points);
  explicit SpatialIndex(const PointCloud& cloud);

  int size() const { return static_cast<int>(points_.size()); }
  const Vec3& point(int i) const { return points_[i]; }

  std::vector<Neighbor> knn(const Vec3& query, int k) const;
  int nearest(const Vec3& query) const;
  // Indices with Euclidean distance <= r, in ascending index order.
  std::vector<int> radius_query(const Vec3& query, double r) const;

 private:
  struct Node {
    int axis = -1;       // -1 marks a leaf
    double split = 0.0;  // coordinate of the median element on `axis`
    int left = -1, right = -1;
    int begin = 0, end = 0;  // range into order_
  };

  int build(int begin, int end);
  template <class Visitor>
  void walk(int node, const Vec3& q, double& bound, Visitor&& visit) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// Map between a cloud and its grid-subsampled version. members[j] lists the
// source indices collapsed into subsampled point j; representative[i] is the
// subsampled index owning source point i.
struct SubsampleMap {
  double cell = 0.0;
  std::vector<std::vector<int>> members;
  std::vector<int> representative;
};

// One output point per occupied cubic cell: centroid position, mean features,
// majority label (ties -> smallest class id).
std::pair<PointCloud, SubsampleMap> grid_subsample(const PointCloud& cloud, double cell);

// ---- file ingestion ------------------------------------------------------

enum class CloudFormat { xyz, csv, ply_ascii };

// Column roles for xyz/csv: one char per column.
//   x y z : position   r g b : color byte, rescaled to [0,1]
//   f     : raw feature value   l : class label   s : skip
struct ColumnSchema {
  std::vector<char> roles;
  int class_count = 0;  // 0 = infer from data

  static ColumnSchema parse(std::string_view spec, int class_count = 0);
  int feature_dim() const;
  bool has_label() const;
};

PointCloud parse_cloud(std::istream& in, CloudFormat format, const ColumnSchema& schema);

// Writes one point per line following the schema role string (same alphabet
// as ColumnSchema; 'r','g','b' emit bytes, 'f' raw values, 'l' the label).
void write_cloud(std::ostream& out, const PointCloud& cloud, std::string_view roles);

// "x y z value" per line; used for TOD map export.
void write_scalar_field(std::ostream& out, const PointCloud& cloud, std::span<const double> value,
                        std::string_view name);

// ---- nearest-neighbor transfer ------------------------------------------

// For each target position, the index of its nearest source point.
std::vector<int> nn_indices(const SpatialIndex& source, std::span<const Vec3> targets);

template <class T>
std::vector<T> nn_transfer(const SpatialIndex& source, std::span<const T> payload,
                           std::span<const Vec3> targets) {
  if (payload.size() != static_cast<std::size_t>(source.size())) {
    throw Error("nn_transfer: payload length does not match source size");
  }
  std::vector<int> idx = nn_indices(source, targets);
  std::vector<T> out;
  out.reserve(targets.size());
  for (int i : idx) out.push_back(payload[i]);
  return out;
}

}  // namespace ococ
