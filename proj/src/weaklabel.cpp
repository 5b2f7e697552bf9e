#include "ococ/weaklabel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace ococ {

long long LabeledPool::total_clicks() const {
  long long n = 0;
  for (const Entry& e : entries) n += static_cast<long long>(e.label.clicks.size());
  return n;
}

std::vector<long long> LabeledPool::click_counts(int class_count) const {
  std::vector<long long> counts(class_count, 0);
  for (const Entry& e : entries) {
    for (const auto& [cls, idx] : e.label.clicks) ++counts[cls];
  }
  return counts;
}

std::vector<double> LabeledPool::multi_hot(const Entry& e, int class_count) {
  std::vector<double> y(class_count, 0.0);
  for (const auto& [cls, idx] : e.label.clicks) y[cls] = 1.0;
  return y;
}

SubCloud extract_subcloud(const PointCloud& cloud, const SpatialIndex& index, const Vec3& center,
                          double r, int cycle, int id) {
  SubCloud sub;
  sub.id = id;
  sub.center = center;
  sub.radius = r;
  sub.cycle = cycle;
  sub.members = index.radius_query(center, r);
  if (sub.members.empty()) throw Error("empty sub-cloud");
  (void)cloud;
  return sub;
}

OcocLabel simulate_ococ_random(const SubCloud& sub, std::span<const int> gt, Rng& rng) {
  // Candidates per class, class ids ascending so the rng draw order is fixed.
  std::map<int, std::vector<int>> by_class;
  for (int i : sub.members) by_class[gt[i]].push_back(i);
  OcocLabel label;
  for (const auto& [cls, candidates] : by_class) {
    label.clicks[cls] = candidates[rng.index(candidates.size())];
  }
  return label;
}

double boundary_decay(double r, double d) { return 1.0 - std::exp(-r * (r - d)); }

std::vector<double> click_saliency(const SubCloud& sub, const PointCloud& cloud,
                                   std::span<const double> tod, std::span<const int> gt, int k) {
  const std::size_t n = sub.members.size();
  if (tod.size() != n) throw Error("click_saliency: tod length mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw Error("click_saliency: k exceeds member count");
  }
  for (double v : tod) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("click_saliency: tod must be finite, >= 0");
  }

  std::vector<Vec3> member_pos(n);
  for (std::size_t i = 0; i < n; ++i) member_pos[i] = cloud.positions[sub.members[i]];
  const SpatialIndex local(member_pos);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int own = gt[sub.members[i]];
    double acc = 0.0;
    for (const Neighbor& nb : local.knn(member_pos[i], k)) {
      if (gt[sub.members[nb.index]] == own) acc += tod[nb.index];
    }
    const double d = dist_xy(member_pos[i], sub.center);
    out[i] = (acc / static_cast<double>(k)) * boundary_decay(sub.radius, d);
  }
  return out;
}

OcocLabel simulate_ococ_tod(const SubCloud& sub, const PointCloud& cloud,
                            std::span<const double> tod, std::span<const int> gt, int k) {
  const std::vector<double> saliency = click_saliency(sub, cloud, tod, gt, k);
  // Members are ascending, so strict '>' keeps the smallest point index on ties.
  std::map<int, std::pair<double, int>> best;  // class -> (D', point index)
  for (std::size_t i = 0; i < sub.members.size(); ++i) {
    const int cls = gt[sub.members[i]];
    auto it = best.find(cls);
    if (it == best.end()) {
      best.emplace(cls, std::make_pair(saliency[i], sub.members[i]));
    } else if (saliency[i] > it->second.first) {
      it->second = {saliency[i], sub.members[i]};
    }
  }
  OcocLabel label;
  for (const auto& [cls, pick] : best) label.clicks[cls] = pick.second;
  return label;
}

std::vector<double> class_weights(const LabeledPool& pool, int class_count) {
  const std::vector<long long> counts = pool.click_counts(class_count);
  double denom = 0.0;
  for (long long m : counts) {
    if (m > 0) denom += 1.0 / std::sqrt(static_cast<double>(m));
  }
  if (denom == 0.0) throw Error("class_weights: pool has no clicks");
  std::vector<double> w(class_count, 0.0);
  for (int c = 0; c < class_count; ++c) {
    if (counts[c] > 0) w[c] = (1.0 / std::sqrt(static_cast<double>(counts[c]))) / denom;
  }
  return w;
}

double label_fraction(const LabeledPool& pool, std::size_t cloud_size) {
  if (cloud_size == 0) throw Error("label_fraction: empty cloud");
  return static_cast<double>(pool.total_clicks()) / static_cast<double>(cloud_size);
}

void save_pool(std::ostream& out, const LabeledPool& pool) {
  nlohmann::json j;
  j["subclouds"] = nlohmann::json::array();
  for (const LabeledPool::Entry& e : pool.entries) {
    nlohmann::json s;
    s["id"] = e.sub.id;
    s["center"] = {e.sub.center[0], e.sub.center[1], e.sub.center[2]};
    s["radius"] = e.sub.radius;
    s["cycle"] = e.sub.cycle;
    s["members"] = e.sub.members;
    nlohmann::json clicks = nlohmann::json::array();
    for (const auto& [cls, idx] : e.label.clicks) clicks.push_back({cls, idx});
    s["clicks"] = std::move(clicks);
    j["subclouds"].push_back(std::move(s));
  }
  out << j.dump(1) << "\n";
}

LabeledPool load_pool(std::istream& in) {
  nlohmann::json j;
  in >> j;
  LabeledPool pool;
  for (const auto& s : j.at("subclouds")) {
    LabeledPool::Entry e;
    e.sub.id = s.at("id").get<int>();
    const auto& c = s.at("center");
    e.sub.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
    e.sub.radius = s.at("radius").get<double>();
    e.sub.cycle = s.at("cycle").get<int>();
    e.sub.members = s.at("members").get<std::vector<int>>();
    for (const auto& click : s.at("clicks")) {
      e.label.clicks[click.at(0).get<int>()] = click.at(1).get<int>();
    }
    pool.entries.push_back(std::move(e));
  }
  return pool;
}

}  // namespace ococ
