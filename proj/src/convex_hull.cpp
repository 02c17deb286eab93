#include "stackpack/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

struct HullFace {
  std::array<int, 3> v{};
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
  bool alive = true;
  std::vector<int> outside;
};

std::uint64_t edge_key(int from, int to) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
         static_cast<std::uint32_t>(to);
}

class HullBuilder {
 public:
  explicit HullBuilder(std::vector<Vec3> points) : pts_(std::move(points)) {}

  TriangleMesh build() {
    std::array<int, 4> simplex = initial_simplex();
    const Vec3 centroid =
        (pts_[simplex[0]] + pts_[simplex[1]] + pts_[simplex[2]] + pts_[simplex[3]]) / 4.0;
    const std::array<std::array<int, 3>, 4> tets = {{{simplex[0], simplex[1], simplex[2]},
                                                     {simplex[0], simplex[3], simplex[1]},
                                                     {simplex[1], simplex[3], simplex[2]},
                                                     {simplex[0], simplex[2], simplex[3]}}};
    for (auto tri : tets) {
      const Vec3 n = (pts_[tri[1]] - pts_[tri[0]]).cross(pts_[tri[2]] - pts_[tri[0]]);
      if (n.dot(pts_[tri[0]] - centroid) < 0.0) std::swap(tri[1], tri[2]);
      add_face(tri);
    }

    std::vector<int> rest;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      if (std::find(simplex.begin(), simplex.end(), i) == simplex.end()) rest.push_back(i);
    }
    assign(rest, 0);

    for (std::size_t f = 0; f < faces_.size(); ++f) {
      while (faces_[f].alive && !faces_[f].outside.empty()) expand(static_cast<int>(f));
    }
    return emit();
  }

 private:
  double distance(const HullFace& f, int p) const { return f.normal.dot(pts_[p]) - f.offset; }

  std::array<int, 4> initial_simplex() const {
    const int n = static_cast<int>(pts_.size());
    if (n < 4) throw DegeneracyError("convex hull needs at least 4 distinct points");
    const int i0 = 0;  // points are sorted lexicographically
    int i1 = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[i0]).norm();
      if (d > best) best = d, i1 = i;
    }
    if (i1 < 0 || best <= kHullTolerance) throw DegeneracyError("convex hull input is degenerate (coincident points)");
    const Vec3 axis = (pts_[i1] - pts_[i0]).normalized();
    int i2 = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[i0]).cross(axis).norm();
      if (d > best) best = d, i2 = i;
    }
    if (i2 < 0 || best <= kHullTolerance) throw DegeneracyError("convex hull input is degenerate (collinear points)");
    const Vec3 normal = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(normal.dot(pts_[i] - pts_[i0]));
      if (d > best) best = d, i3 = i;
    }
    if (i3 < 0 || best <= kHullTolerance) throw DegeneracyError("convex hull input is degenerate (coplanar points)");
    return {i0, i1, i2, i3};
  }

  int add_face(const std::array<int, 3>& v) {
    HullFace f;
    f.v = v;
    f.normal = (pts_[v[1]] - pts_[v[0]]).cross(pts_[v[2]] - pts_[v[0]]).normalized();
    f.offset = f.normal.dot(pts_[v[0]]);
    const int id = static_cast<int>(faces_.size());
    for (int k = 0; k < 3; ++k) edges_[edge_key(v[k], v[(k + 1) % 3])] = id;
    faces_.push_back(std::move(f));
    return id;
  }

  void assign(const std::vector<int>& points, std::size_t first_face) {
    for (int p : points) {
      for (std::size_t f = first_face; f < faces_.size(); ++f) {
        if (faces_[f].alive && distance(faces_[f], p) > kHullTolerance) {
          faces_[f].outside.push_back(p);
          break;
        }
      }
    }
  }

  void expand(int face_id) {
    const HullFace& seed = faces_[face_id];
    int apex = seed.outside.front();
    double best = distance(seed, apex);
    for (int p : seed.outside) {
      const double d = distance(seed, p);
      if (d > best) best = d, apex = p;
    }

    std::vector<int> visible{face_id};
    std::unordered_set<int> seen{face_id};
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const std::array<int, 3> v = faces_[visible[q]].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k];
        const int b = v[(k + 1) % 3];
        const int nb = edges_.at(edge_key(b, a));
        if (seen.count(nb) != 0) continue;
        if (distance(faces_[nb], apex) > kHullTolerance) {
          seen.insert(nb);
          visible.push_back(nb);
        } else {
          horizon.emplace_back(a, b);
        }
      }
    }
    std::vector<int> orphans;
    for (int f : visible) {
      HullFace& face = faces_[f];
      face.alive = false;
      for (int k = 0; k < 3; ++k) {
        auto it = edges_.find(edge_key(face.v[k], face.v[(k + 1) % 3]));
        if (it != edges_.end() && it->second == f) edges_.erase(it);
      }
      for (int p : face.outside) {
        if (p != apex) orphans.push_back(p);
      }
      face.outside.clear();
      face.outside.shrink_to_fit();
    }
    const std::size_t first_new = faces_.size();
    for (const auto& [a, b] : horizon) add_face({a, b, apex});
    assign(orphans, first_new);
  }

  TriangleMesh emit() const {
    std::vector<int> used;
    for (const HullFace& f : faces_) {
      if (!f.alive) continue;
      used.insert(used.end(), f.v.begin(), f.v.end());
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::unordered_map<int, std::uint32_t> remap;
    TriangleMesh out;
    for (int idx : used) {
      remap[idx] = static_cast<std::uint32_t>(out.vertices.size());
      out.vertices.push_back(pts_[idx]);
    }
    for (const HullFace& f : faces_) {
      if (!f.alive) continue;
      out.triangles.push_back({remap.at(f.v[0]), remap.at(f.v[1]), remap.at(f.v[2])});
    }
    return out;
  }

  std::vector<Vec3> pts_;
  std::vector<HullFace> faces_;
  std::unordered_map<std::uint64_t, int> edges_;
};

}  // namespace

TriangleMesh convex_hull(const std::vector<Vec3>& points) {
  std::vector<Vec3> pts = points;
  for (const Vec3& p : pts) {
    if (!p.allFinite()) throw ValidationError("convex hull input has non-finite coordinates");
  }
  auto less = [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return HullBuilder(std::move(pts)).build();
}

TriangleMesh convex_hull(const TriangleMesh& mesh) { return convex_hull(mesh.vertices); }

}  // namespace stackpack
