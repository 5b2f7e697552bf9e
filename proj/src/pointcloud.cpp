#include "ococ/pointcloud.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "ococ/rng.hpp"

namespace ococ {

void PointCloud::validate() const {
  const std::size_t n = positions.size();
  if (n == 0) throw Error("point cloud is empty");
  if (features.size() != n * static_cast<std::size_t>(feature_dim)) {
    throw Error("feature block size does not match N * feature_dim");
  }
  if (!labels.empty() && labels.size() != n) throw Error("label count does not match N");
  for (const Vec3& p : positions) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
      throw Error("non-finite coordinate");
    }
  }
  if (!labels.empty()) {
    for (int l : labels) {
      if (l < 0 || (class_count > 0 && l >= class_count)) throw Error("label out of range");
    }
  }
}

// ---- SpatialIndex ----------------------------------------------------------

namespace {
constexpr int kLeafSize = 16;
}

SpatialIndex::SpatialIndex(std::span<const Vec3> points)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) throw Error("spatial index requires at least one point");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<int>(order_.size()));
}

SpatialIndex::SpatialIndex(const PointCloud& cloud)
    : SpatialIndex(std::span<const Vec3>(cloud.positions)) {}

int SpatialIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  // Split on the widest axis at the median.
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    const Vec3& p = points_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = points_[a][axis], cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

// Generic traversal: visit(point_index, sq_dist) may shrink `bound` (the
// squared search radius). Subtrees are pruned only when the splitting plane is
// strictly farther than the bound, so exact ties are always visited.
template <class Visitor>
void SpatialIndex::walk(int node, const Vec3& q, double& bound, Visitor&& visit) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (int i = nd.begin; i < nd.end; ++i) {
      const int idx = order_[i];
      visit(idx, sq_dist(points_[idx], q));
    }
    return;
  }
  const double delta = q[nd.axis] - nd.split;
  const int near = delta < 0.0 ? nd.left : nd.right;
  const int far = delta < 0.0 ? nd.right : nd.left;
  walk(near, q, bound, visit);
  if (delta * delta <= bound) walk(far, q, bound, visit);
}

std::vector<Neighbor> SpatialIndex::knn(const Vec3& query, int k) const {
  if (k < 1) throw Error("knn: k must be positive");
  if (k > size()) throw Error("knn: k exceeds point count");

  using Entry = std::pair<double, int>;  // (sq_dist, index); lexicographic order
  std::priority_queue<Entry> heap;
  double bound = std::numeric_limits<double>::infinity();
  walk(0, query, bound, [&](int idx, double d2) {
    const Entry e{d2, idx};
    if (static_cast<int>(heap.size()) < k) {
      heap.push(e);
      if (static_cast<int>(heap.size()) == k) bound = heap.top().first;
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
      bound = heap.top().first;
    }
  });

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

int SpatialIndex::nearest(const Vec3& query) const { return knn(query, 1)[0].index; }

std::vector<int> SpatialIndex::radius_query(const Vec3& query, double r) const {
  std::vector<int> out;
  double bound = r * r;
  walk(0, query, bound, [&](int idx, double d2) {
    if (d2 <= r * r) out.push_back(idx);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> nn_indices(const SpatialIndex& source, std::span<const Vec3> targets) {
  std::vector<int> out;
  out.reserve(targets.size());
  for (const Vec3& t : targets) out.push_back(source.nearest(t));
  return out;
}

// ---- grid subsampling ------------------------------------------------------

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(k.x));
    h = mix64(h ^ static_cast<std::uint64_t>(k.y));
    h = mix64(h ^ static_cast<std::uint64_t>(k.z));
    return static_cast<std::size_t>(h);
  }
};

std::int64_t cell_coord(double v, double cell) {
  return static_cast<std::int64_t>(std::floor(v / cell));
}

}  // namespace

std::pair<PointCloud, SubsampleMap> grid_subsample(const PointCloud& cloud, double cell) {
  if (!(cell > 0.0)) throw Error("grid_subsample: cell size must be positive");
  cloud.validate();
  const std::size_t n = cloud.size();
  const int d = cloud.feature_dim;

  // Slot per occupied cell in first-seen order, so output ordering does not
  // depend on hash internals.
  std::unordered_map<CellKey, int, CellKeyHash> slot;
  slot.reserve(n);
  SubsampleMap map;
  map.cell = cell;
  map.representative.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = cloud.positions[i];
    const CellKey key{cell_coord(p[0], cell), cell_coord(p[1], cell), cell_coord(p[2], cell)};
    auto [it, inserted] = slot.try_emplace(key, static_cast<int>(map.members.size()));
    if (inserted) map.members.emplace_back();
    map.members[it->second].push_back(static_cast<int>(i));
    map.representative[i] = it->second;
  }

  const std::size_t m = map.members.size();
  PointCloud out;
  out.feature_dim = d;
  out.class_count = cloud.class_count;
  out.positions.resize(m);
  out.features.assign(m * static_cast<std::size_t>(d), 0.0);
  if (cloud.has_labels()) out.labels.resize(m);

  std::vector<int> votes(std::max(cloud.class_count, 1));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& mem = map.members[j];
    Vec3 c{0, 0, 0};
    for (int i : mem) {
      for (int a = 0; a < 3; ++a) c[a] += cloud.positions[i][a];
      for (int t = 0; t < d; ++t) out.features[j * d + t] += cloud.features[i * d + t];
    }
    const double inv = 1.0 / static_cast<double>(mem.size());
    for (int a = 0; a < 3; ++a) out.positions[j][a] = c[a] * inv;
    for (int t = 0; t < d; ++t) out.features[j * d + t] *= inv;

    if (cloud.has_labels()) {
      std::fill(votes.begin(), votes.end(), 0);
      int max_label = 0;
      for (int i : mem) max_label = std::max(max_label, cloud.labels[i]);
      if (max_label >= static_cast<int>(votes.size())) votes.resize(max_label + 1, 0);
      for (int i : mem) ++votes[cloud.labels[i]];
      int best = 0;
      for (std::size_t c2 = 1; c2 < votes.size(); ++c2) {
        if (votes[c2] > votes[best]) best = static_cast<int>(c2);
      }
      out.labels[j] = best;
    }
  }
  return {std::move(out), std::move(map)};
}

// ---- parsing ---------------------------------------------------------------

namespace {

constexpr std::string_view kRoleChars = "xyzrgbfls";

double parse_number(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw Error("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

long parse_int(std::string_view tok, std::size_t line_no) {
  long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw Error("line " + std::to_string(line_no) + ": bad integer '" + std::string(tok) + "'");
  }
  return v;
}

void tokenize(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
}

struct RowParser {
  std::vector<char> roles;
  int class_count = 0;

  void consume(const std::vector<std::string_view>& toks, std::size_t line_no, PointCloud& cloud,
               bool& saw_label) const {
    if (toks.size() != roles.size()) {
      throw Error("line " + std::to_string(line_no) + ": expected " +
                  std::to_string(roles.size()) + " columns, got " + std::to_string(toks.size()));
    }
    Vec3 pos{0, 0, 0};
    std::vector<double> feat;
    int label = -1;
    for (std::size_t c = 0; c < roles.size(); ++c) {
      switch (roles[c]) {
        case 'x': pos[0] = parse_number(toks[c], line_no); break;
        case 'y': pos[1] = parse_number(toks[c], line_no); break;
        case 'z': pos[2] = parse_number(toks[c], line_no); break;
        case 'r':
        case 'g':
        case 'b': feat.push_back(parse_number(toks[c], line_no) / 255.0); break;
        case 'f': feat.push_back(parse_number(toks[c], line_no)); break;
        case 'l': {
          const long v = parse_int(toks[c], line_no);
          if (v < 0 || (class_count > 0 && v >= class_count)) {
            throw Error("line " + std::to_string(line_no) + ": label " + std::to_string(v) +
                        " outside [0, " + std::to_string(class_count) + ")");
          }
          label = static_cast<int>(v);
          saw_label = true;
          break;
        }
        case 's': break;
        default: throw Error("unknown column role");
      }
    }
    cloud.positions.push_back(pos);
    cloud.features.insert(cloud.features.end(), feat.begin(), feat.end());
    if (label >= 0) cloud.labels.push_back(label);
  }
};

PointCloud parse_rows(std::istream& in, const RowParser& parser, std::size_t line_no,
                      std::size_t expected_rows, int class_count) {
  PointCloud cloud;
  cloud.class_count = class_count;
  cloud.feature_dim = 0;
  for (char r : parser.roles) {
    if (r == 'r' || r == 'g' || r == 'b' || r == 'f') ++cloud.feature_dim;
  }
  bool saw_label = false;
  std::string line;
  std::vector<std::string_view> toks;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    std::string_view body(line);
    if (hash != std::string::npos) body = body.substr(0, hash);
    tokenize(body, toks);
    if (toks.empty()) continue;
    parser.consume(toks, line_no, cloud, saw_label);
    if (++rows == expected_rows) break;
  }
  if (cloud.positions.empty()) throw Error("no points");
  if (expected_rows != 0 && rows != expected_rows) {
    throw Error("expected " + std::to_string(expected_rows) + " vertex rows, got " +
                std::to_string(rows));
  }
  if (saw_label && cloud.labels.size() != cloud.positions.size()) {
    throw Error("label column missing on some rows");
  }
  if (saw_label && cloud.class_count == 0) {
    cloud.class_count = *std::max_element(cloud.labels.begin(), cloud.labels.end()) + 1;
  }
  cloud.validate();
  return cloud;
}

PointCloud parse_ply_ascii(std::istream& in, int class_count) {
  std::string line;
  std::vector<std::string_view> toks;
  if (!std::getline(in, line)) throw Error("no points");
  std::size_t line_no = 1;
  tokenize(line, toks);
  if (toks.size() != 1 || toks[0] != "ply") throw Error("line 1: missing 'ply' magic");

  RowParser parser;
  parser.class_count = class_count;
  std::size_t vertex_count = 0;
  bool in_vertex = false, format_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    tokenize(line, toks);
    if (toks.empty()) continue;
    if (toks[0] == "comment") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") throw Error("only ascii ply is supported");
      format_seen = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) throw Error("line " + std::to_string(line_no) + ": bad element");
      if (toks[1] == "vertex") {
        vertex_count = static_cast<std::size_t>(parse_int(toks[2], line_no));
        in_vertex = true;
      } else {
        if (parse_int(toks[2], line_no) != 0) {
          throw Error("unsupported ply element '" + std::string(toks[1]) + "'");
        }
        in_vertex = false;
      }
    } else if (toks[0] == "property") {
      if (!in_vertex) continue;
      if (toks.size() != 3) throw Error("line " + std::to_string(line_no) + ": bad property");
      const std::string_view name = toks[2];
      if (name == "x") parser.roles.push_back('x');
      else if (name == "y") parser.roles.push_back('y');
      else if (name == "z") parser.roles.push_back('z');
      else if (name == "red") parser.roles.push_back('r');
      else if (name == "green") parser.roles.push_back('g');
      else if (name == "blue") parser.roles.push_back('b');
      else if (name == "class" || name == "label" || name == "scalar_label") {
        parser.roles.push_back('l');
      } else {
        parser.roles.push_back('s');
      }
    } else if (toks[0] == "end_header") {
      break;
    } else {
      throw Error("line " + std::to_string(line_no) + ": unexpected header token '" +
                  std::string(toks[0]) + "'");
    }
  }
  if (!format_seen) throw Error("ply header missing format line");
  if (vertex_count == 0) throw Error("no points");
  return parse_rows(in, parser, line_no, vertex_count, class_count);
}

}  // namespace

ColumnSchema ColumnSchema::parse(std::string_view spec, int class_count) {
  ColumnSchema s;
  s.class_count = class_count;
  for (char c : spec) {
    if (c == '+' || c == ' ') continue;  // allow "xyzrgb+l" style separators
    if (kRoleChars.find(c) == std::string_view::npos) {
      throw Error(std::string("unknown schema column '") + c + "'");
    }
    s.roles.push_back(c);
  }
  if (s.roles.empty()) throw Error("empty schema");
  return s;
}

int ColumnSchema::feature_dim() const {
  int d = 0;
  for (char r : roles) {
    if (r == 'r' || r == 'g' || r == 'b' || r == 'f') ++d;
  }
  return d;
}

bool ColumnSchema::has_label() const {
  return std::find(roles.begin(), roles.end(), 'l') != roles.end();
}

PointCloud parse_cloud(std::istream& in, CloudFormat format, const ColumnSchema& schema) {
  if (format == CloudFormat::ply_ascii) return parse_ply_ascii(in, schema.class_count);
  RowParser parser{schema.roles, schema.class_count};
  return parse_rows(in, parser, 0, 0, schema.class_count);
}

void write_cloud(std::ostream& out, const PointCloud& cloud, std::string_view roles) {
  char buf[64];
  const auto emit = [&](double v) {
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.write(buf, len);
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    int fcol = 0;
    bool first = true;
    for (char r : roles) {
      if (!first) out.put(' ');
      first = false;
      switch (r) {
        case 'x': emit(cloud.positions[i][0]); break;
        case 'y': emit(cloud.positions[i][1]); break;
        case 'z': emit(cloud.positions[i][2]); break;
        case 'r':
        case 'g':
        case 'b': {
          const double v = cloud.features[i * cloud.feature_dim + fcol++];
          const long byte = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
          out << byte;
          break;
        }
        case 'f': emit(cloud.features[i * cloud.feature_dim + fcol++]); break;
        case 'l': out << (cloud.has_labels() ? cloud.labels[i] : 0); break;
        default: throw Error("write_cloud: unsupported role");
      }
    }
    out.put('\n');
  }
}

void write_scalar_field(std::ostream& out, const PointCloud& cloud, std::span<const double> value,
                        std::string_view name) {
  if (value.size() != cloud.size()) throw Error("scalar field length mismatch");
  out << "# x y z " << name << "\n";
  char buf[64];
  const auto emit = [&](double v) {
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.write(buf, len);
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    emit(cloud.positions[i][0]);
    out.put(' ');
    emit(cloud.positions[i][1]);
    out.put(' ');
    emit(cloud.positions[i][2]);
    out.put(' ');
    emit(value[i]);
    out.put('\n');
  }
}

}  // namespace ococ
