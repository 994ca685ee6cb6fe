#include <numbers>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "heatcover/geometry.hpp"

namespace heatcover {

namespace {

using int128 = __int128;

// > 0 when (a, b, c) is CCW. Exact for 64-bit lattice coordinates.
inline int orient_sign(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c) {
  const int128 d = int128(b.x - a.x) * int128(c.y - a.y) - int128(b.y - a.y) * int128(c.x - a.x);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

// > 0 when d is strictly inside the circumcircle of CCW triangle (a, b, c).
inline int incircle_sign(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c,
                         const LatticePoint& d) {
  const int64_t adx = a.x - d.x, ady = a.y - d.y;
  const int64_t bdx = b.x - d.x, bdy = b.y - d.y;
  const int64_t cdx = c.x - d.x, cdy = c.y - d.y;
  const int128 ad2 = int128(adx) * adx + int128(ady) * ady;
  const int128 bd2 = int128(bdx) * bdx + int128(bdy) * bdy;
  const int128 cd2 = int128(cdx) * cdx + int128(cdy) * cdy;
  const int128 det = int128(adx) * (int128(bdy) * cd2 - int128(cdy) * bd2) -
                     int128(ady) * (int128(bdx) * cd2 - int128(cdx) * bd2) +
                     ad2 * (int128(bdx) * int128(cdy) - int128(cdx) * int128(bdy));
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

struct BwTriangle {
  int32_t v[3];    // CCW
  int32_t nbr[3];  // neighbor across edge (v[k], v[k+1]), -1 at the outside
  bool alive = true;
};

class BowyerWatson {
 public:
  explicit BowyerWatson(const std::vector<LatticePoint>& pts) : pts_(pts) {}

  std::vector<Triangle> run() {
    const size_t n_real = pts_.size() - 3;  // super vertices appended at the back
    make_super_triangle();
    for (int32_t p = 0; p < static_cast<int32_t>(n_real); ++p) insert(p);

    std::vector<Triangle> out;
    for (const BwTriangle& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= static_cast<int32_t>(n_real) || t.v[1] >= static_cast<int32_t>(n_real) ||
          t.v[2] >= static_cast<int32_t>(n_real))
        continue;
      out.push_back(Triangle{{t.v[0], t.v[1], t.v[2]}});
    }
    return out;
  }

 private:
  void make_super_triangle() {
    int64_t x0 = pts_[0].x, x1 = x0, y0 = pts_[0].y, y1 = y0;
    const size_t n_real = pts_.size() - 3;
    for (size_t i = 1; i < n_real; ++i) {
      x0 = std::min(x0, pts_[i].x);
      x1 = std::max(x1, pts_[i].x);
      y0 = std::min(y0, pts_[i].y);
      y1 = std::max(y1, pts_[i].y);
    }
    const int64_t extent = std::max<int64_t>({x1 - x0, y1 - y0, 1});
    const int64_t m = 4096 * (extent + 4);
    const int64_t cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
    const int32_t s = static_cast<int32_t>(n_real);
    pts_[static_cast<size_t>(s)] = {cx - 3 * m, cy - m};
    pts_[static_cast<size_t>(s) + 1] = {cx + 3 * m, cy - m};
    pts_[static_cast<size_t>(s) + 2] = {cx, cy + 3 * m};
    tris_.push_back(BwTriangle{{s, s + 1, s + 2}, {-1, -1, -1}, true});
    last_ = 0;
  }

  // Visibility walk from the last created triangle; capped with a linear
  // scan fallback for degenerate configurations.
  int32_t locate(int32_t p) const {
    const LatticePoint& q = pts_[static_cast<size_t>(p)];
    int32_t cur = last_;
    const size_t cap = 4 * tris_.size() + 16;
    for (size_t steps = 0; steps < cap; ++steps) {
      const BwTriangle& t = tris_[static_cast<size_t>(cur)];
      int32_t next = -1;
      bool inside = true;
      for (int k = 0; k < 3; ++k) {
        const int s = orient_sign(pts_[static_cast<size_t>(t.v[k])],
                                  pts_[static_cast<size_t>(t.v[(k + 1) % 3])], q);
        if (s < 0) {
          inside = false;
          next = t.nbr[k];
          break;
        }
      }
      if (inside) return cur;
      if (next < 0) break;
      cur = next;
    }
    for (int32_t i = 0; i < static_cast<int32_t>(tris_.size()); ++i) {
      const BwTriangle& t = tris_[static_cast<size_t>(i)];
      if (!t.alive) continue;
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k)
        inside = orient_sign(pts_[static_cast<size_t>(t.v[k])],
                             pts_[static_cast<size_t>(t.v[(k + 1) % 3])], q) >= 0;
      if (inside) return i;
    }
    throw std::logic_error("delaunay: point location failed");
  }

  bool in_conflict(int32_t tri, int32_t p) const {
    const BwTriangle& t = tris_[static_cast<size_t>(tri)];
    return incircle_sign(pts_[static_cast<size_t>(t.v[0])], pts_[static_cast<size_t>(t.v[1])],
                         pts_[static_cast<size_t>(t.v[2])], pts_[static_cast<size_t>(p)]) > 0;
  }

  void insert(int32_t p) {
    const int32_t seed = locate(p);

    // Conflict cavity: connected set of triangles whose circumcircle
    // strictly contains p.
    cavity_.clear();
    stack_.clear();
    stack_.push_back(seed);
    tris_[static_cast<size_t>(seed)].alive = false;
    cavity_.push_back(seed);
    while (!stack_.empty()) {
      const int32_t cur = stack_.back();
      stack_.pop_back();
      for (int k = 0; k < 3; ++k) {
        const int32_t nb = tris_[static_cast<size_t>(cur)].nbr[k];
        if (nb < 0 || !tris_[static_cast<size_t>(nb)].alive) continue;
        if (in_conflict(nb, p)) {
          tris_[static_cast<size_t>(nb)].alive = false;
          cavity_.push_back(nb);
          stack_.push_back(nb);
        }
      }
    }

    // Boundary edges of the cavity, each becomes a fan triangle with p.
    boundary_.clear();
    for (int32_t dead : cavity_) {
      const BwTriangle& t = tris_[static_cast<size_t>(dead)];
      for (int k = 0; k < 3; ++k) {
        const int32_t nb = t.nbr[k];
        if (nb >= 0 && !tris_[static_cast<size_t>(nb)].alive) continue;
        boundary_.push_back({t.v[k], t.v[(k + 1) % 3], nb});
      }
    }

    const int32_t base = static_cast<int32_t>(tris_.size());
    start_of_.clear();
    for (size_t e = 0; e < boundary_.size(); ++e) {
      const auto& [a, b, outside] = boundary_[e];
      if (orient_sign(pts_[static_cast<size_t>(a)], pts_[static_cast<size_t>(b)],
                      pts_[static_cast<size_t>(p)]) <= 0)
        throw std::logic_error("delaunay: degenerate cavity boundary");
      tris_.push_back(BwTriangle{{a, b, p}, {outside, -1, -1}, true});
      if (outside >= 0) {
        BwTriangle& o = tris_[static_cast<size_t>(outside)];
        for (int k = 0; k < 3; ++k)
          if (o.v[k] == b && o.v[(k + 1) % 3] == a) o.nbr[k] = base + static_cast<int32_t>(e);
      }
      start_of_.push_back({a, base + static_cast<int32_t>(e)});
    }
    // Link the fan: edge (b, p) of one triangle meets edge (p, a') of the
    // triangle whose boundary edge starts at b.
    for (size_t e = 0; e < boundary_.size(); ++e) {
      const int32_t b = std::get<1>(boundary_[e]);
      int32_t mate = -1;
      for (const auto& [start, tri] : start_of_)
        if (start == b) {
          mate = tri;
          break;
        }
      if (mate < 0) throw std::logic_error("delaunay: open cavity boundary");
      tris_[static_cast<size_t>(base) + e].nbr[1] = mate;
      tris_[static_cast<size_t>(mate)].nbr[2] = base + static_cast<int32_t>(e);
    }
    last_ = base;
  }

  std::vector<LatticePoint> pts_;
  std::vector<BwTriangle> tris_;
  int32_t last_ = 0;
  std::vector<int32_t> cavity_;
  std::vector<int32_t> stack_;
  std::vector<std::tuple<int32_t, int32_t, int32_t>> boundary_;  // (a, b, outside)
  std::vector<std::pair<int32_t, int32_t>> start_of_;

 public:
  static std::vector<LatticePoint> with_super_slots(const std::vector<LatticePoint>& pts) {
    std::vector<LatticePoint> all = pts;
    all.resize(pts.size() + 3);
    return all;
  }
};

}  // namespace

std::vector<Triangle> delaunay_lattice(const std::vector<LatticePoint>& pts) {
  if (pts.size() < 3) throw std::invalid_argument("delaunay_lattice: fewer than 3 sample points");
  {
    std::vector<std::pair<int64_t, int64_t>> sorted;
    sorted.reserve(pts.size());
    for (const LatticePoint& p : pts) sorted.emplace_back(p.x, p.y);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("delaunay_lattice: duplicate points");
  }
  BowyerWatson bw(BowyerWatson::with_super_slots(pts));
  return bw.run();
}

TriMesh delaunay_triangulate(const RegionGrid& region, const CellSet& cells, double max_edge,
                             double coverage_radius) {
  if (!(max_edge < coverage_radius))
    throw std::invalid_argument("delaunay_triangulate: mesh max edge must be smaller than the coverage radius");
  if (cells.count() == 0) throw std::invalid_argument("delaunay_triangulate: empty cell set");
  const double h = region.spacing;
  if (h * std::numbers::sqrt2 > max_edge)
    throw std::invalid_argument("delaunay_triangulate: grid too coarse for the requested mesh edge");

  const int stride =
      std::max(1, static_cast<int>(std::floor(max_edge / (2.0 * std::numbers::sqrt2 * h))));

  // Boundary cell centers plus a coarsened interior lattice (anchored to the
  // grid so the sample set does not depend on the partition).
  std::vector<int32_t> sample_cells;
  for (int32_t c : cells.cells) {
    const int i = region.cell_i(c), j = region.cell_j(c);
    bool boundary = false;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4 && !boundary; ++k) {
      const int ni = i + di[k], nj = j + dj[k];
      boundary = !region.in_grid(ni, nj) || !cells.contains(region.idx(ni, nj));
    }
    if (boundary || (i % stride == 0 && j % stride == 0)) sample_cells.push_back(c);
  }
  if (sample_cells.size() < 3)
    throw std::invalid_argument("delaunay_triangulate: fewer than 3 sample points");

  std::vector<LatticePoint> pts;
  pts.reserve(sample_cells.size());
  for (int32_t c : sample_cells) pts.push_back({region.cell_i(c), region.cell_j(c)});
  const std::vector<Triangle> raw = delaunay_lattice(pts);

  TriMesh mesh;
  mesh.region = &region;
  mesh.vertices.reserve(sample_cells.size());
  for (int32_t c : sample_cells) mesh.vertices.push_back(region.center(c));

  for (const Triangle& t : raw) {
    const Vec2 a = mesh.vertices[static_cast<size_t>(t.v[0])];
    const Vec2 b = mesh.vertices[static_cast<size_t>(t.v[1])];
    const Vec2 c = mesh.vertices[static_cast<size_t>(t.v[2])];
    const double longest = std::max({distance(a, b), distance(b, c), distance(c, a)});
    if (longest > max_edge) continue;
    const Vec2 centroid = (a + b + c) * (1.0 / 3.0);
    const int32_t cc = region.cell_of(centroid);
    if (cc < 0 || !cells.contains(cc)) continue;
    mesh.triangles.push_back(t);
    mesh.h_max = std::max(mesh.h_max, longest);
  }
  if (mesh.triangles.empty())
    throw std::invalid_argument("delaunay_triangulate: no triangles survive clipping");

  mesh.locate_index.assign(static_cast<size_t>(region.size()), {});
  for (int32_t t = 0; t < static_cast<int32_t>(mesh.triangles.size()); ++t) {
    Vec2 lo = mesh.vertex(t, 0), hi = lo;
    for (int k = 1; k < 3; ++k) {
      const Vec2 v = mesh.vertex(t, k);
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
    const int i0 = std::max(0, static_cast<int>(std::floor((lo.x - region.origin.x) / h)) - 1);
    const int j0 = std::max(0, static_cast<int>(std::floor((lo.y - region.origin.y) / h)) - 1);
    const int i1 = std::min(region.nx - 1, static_cast<int>(std::floor((hi.x - region.origin.x) / h)) + 1);
    const int j1 = std::min(region.ny - 1, static_cast<int>(std::floor((hi.y - region.origin.y) / h)) + 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        mesh.locate_index[static_cast<size_t>(region.idx(i, j))].push_back(t);
  }

  mesh.tri_cells.assign(mesh.triangles.size(), {});
  for (int32_t c : cells.cells) {
    const std::optional<int32_t> t = locate_triangle(mesh, region.center(c));
    if (t)
      mesh.tri_cells[static_cast<size_t>(*t)].push_back(c);
    else
      ++mesh.uncovered_cells;
  }
  return mesh;
}

}  // namespace heatcover
