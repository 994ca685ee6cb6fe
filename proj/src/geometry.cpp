#include "heatcover/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace heatcover {

std::vector<int32_t> RegionGrid::masked_cells() const {
  std::vector<int32_t> out;
  out.reserve(static_cast<size_t>(masked_count));
  for (int32_t c = 0; c < size(); ++c)
    if (mask[static_cast<size_t>(c)]) out.push_back(c);
  return out;
}

CellSet CellSet::of(const RegionGrid& region, std::vector<int32_t> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  CellSet set;
  set.member.assign(static_cast<size_t>(region.size()), 0);
  for (int32_t c : cells) set.member[static_cast<size_t>(c)] = 1;
  set.cells = std::move(cells);
  return set;
}

RegionGrid build_region(const RegionSpec& spec) {
  if (!(spec.spacing > 0.0))
    throw std::invalid_argument("build_region: non-positive spacing");
  if (!(spec.outer.width() > 0.0) || !(spec.outer.height() > 0.0))
    throw std::invalid_argument("build_region: outer rectangle is empty");

  const double h = spec.spacing;
  const auto dim = [h](double extent, const char* axis) {
    const double f = extent / h;
    const long n = std::lround(f);
    if (n < 1 || std::abs(n * h - extent) > 1e-6 * std::max(1.0, extent))
      throw std::invalid_argument(std::string("build_region: spacing does not tile the outer rectangle along ") + axis);
    return static_cast<int>(n);
  };

  RegionGrid g;
  g.origin = {spec.outer.x0, spec.outer.y0};
  g.spacing = h;
  g.nx = dim(spec.outer.width(), "x");
  g.ny = dim(spec.outer.height(), "y");
  g.mask.assign(static_cast<size_t>(g.size()), 0);

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 c = g.center(i, j);
      bool in = true;
      for (const Rect& hole : spec.holes) {
        if (hole.contains_open(c)) {
          in = false;
          break;
        }
      }
      if (in) {
        g.mask[static_cast<size_t>(g.idx(i, j))] = 1;
        ++g.masked_count;
      }
    }
  }

  if (g.masked_count == 0) throw std::invalid_argument("build_region: empty region");
  if (!is_4connected(g, g.masked_cells()))
    throw std::invalid_argument("build_region: disconnected region");
  return g;
}

bool is_4connected(const RegionGrid& region, const std::vector<int32_t>& cells) {
  if (cells.empty()) return false;
  std::vector<uint8_t> in(static_cast<size_t>(region.size()), 0);
  for (int32_t c : cells) in[static_cast<size_t>(c)] = 1;

  std::vector<uint8_t> seen(static_cast<size_t>(region.size()), 0);
  std::queue<int32_t> q;
  q.push(cells.front());
  seen[static_cast<size_t>(cells.front())] = 1;
  size_t reached = 0;
  while (!q.empty()) {
    const int32_t c = q.front();
    q.pop();
    ++reached;
    const int i = region.cell_i(c), j = region.cell_j(c);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ni = i + di[k], nj = j + dj[k];
      if (!region.in_grid(ni, nj)) continue;
      const int32_t n = region.idx(ni, nj);
      if (in[static_cast<size_t>(n)] && !seen[static_cast<size_t>(n)]) {
        seen[static_cast<size_t>(n)] = 1;
        q.push(n);
      }
    }
  }
  return reached == cells.size();
}

CellSet component_containing(const RegionGrid& region, const CellSet& cells, int32_t seed_cell) {
  if (!cells.contains(seed_cell))
    throw std::invalid_argument("component_containing: seed cell not in set");
  std::vector<uint8_t> seen(static_cast<size_t>(region.size()), 0);
  std::vector<int32_t> comp;
  std::queue<int32_t> q;
  q.push(seed_cell);
  seen[static_cast<size_t>(seed_cell)] = 1;
  while (!q.empty()) {
    const int32_t c = q.front();
    q.pop();
    comp.push_back(c);
    const int i = region.cell_i(c), j = region.cell_j(c);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ni = i + di[k], nj = j + dj[k];
      if (!region.in_grid(ni, nj)) continue;
      const int32_t n = region.idx(ni, nj);
      if (cells.contains(n) && !seen[static_cast<size_t>(n)]) {
        seen[static_cast<size_t>(n)] = 1;
        q.push(n);
      }
    }
  }
  return CellSet::of(region, std::move(comp));
}

Partition voronoi_labels(const RegionGrid& region, const std::vector<Vec2>& positions) {
  const int n = static_cast<int>(positions.size());
  if (n == 0) throw std::invalid_argument("voronoi_labels: no agents");
  for (int a = 0; a < n; ++a) {
    const int32_t c = region.cell_of(positions[a]);
    if (c < 0 || !region.masked_in(c))
      throw std::invalid_argument("voronoi_labels: agent position outside the workspace");
  }

  Partition p;
  p.agent_count = n;
  p.owner.assign(static_cast<size_t>(region.size()), -1);
  p.cells.assign(static_cast<size_t>(n), {});
  p.adjacency.assign(static_cast<size_t>(n) * n, 0);

  for (int32_t c = 0; c < region.size(); ++c) {
    if (!region.masked_in(c)) continue;
    const Vec2 x = region.center(c);
    int best = 0;
    double best_d2 = dot(x - positions[0], x - positions[0]);
    for (int a = 1; a < n; ++a) {
      const double d2 = dot(x - positions[a], x - positions[a]);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = a;
      }
    }
    p.owner[static_cast<size_t>(c)] = best;
    p.cells[static_cast<size_t>(best)].push_back(c);
  }

  for (int j = 0; j < region.ny; ++j) {
    for (int i = 0; i < region.nx; ++i) {
      const int32_t c = region.idx(i, j);
      const int32_t oc = p.owner[static_cast<size_t>(c)];
      if (oc < 0) continue;
      if (i + 1 < region.nx) {
        const int32_t od = p.owner[static_cast<size_t>(region.idx(i + 1, j))];
        if (od >= 0 && od != oc) {
          p.adjacency[static_cast<size_t>(oc) * n + od] = 1;
          p.adjacency[static_cast<size_t>(od) * n + oc] = 1;
        }
      }
      if (j + 1 < region.ny) {
        const int32_t od = p.owner[static_cast<size_t>(region.idx(i, j + 1))];
        if (od >= 0 && od != oc) {
          p.adjacency[static_cast<size_t>(oc) * n + od] = 1;
          p.adjacency[static_cast<size_t>(od) * n + oc] = 1;
        }
      }
    }
  }
  return p;
}

namespace {

// Signed doubled area of (a, b, c); > 0 means CCW. Exact in doubles.
inline double orient2d(Vec2 a, Vec2 b, Vec2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Closed-triangle containment, lowest-index ties handled by scan order.
inline bool point_in_closed_tri(const TriMesh& mesh, int32_t t, Vec2 p) {
  const Vec2 a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
  return orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0;
}

}  // namespace

bool triangle_contains(const TriMesh& mesh, int32_t tri, Vec2 p) {
  return point_in_closed_tri(mesh, tri, p);
}

std::optional<int32_t> locate_triangle(const TriMesh& mesh, Vec2 p) {
  const RegionGrid& g = *mesh.region;
  const int32_t cell = g.cell_of(p);
  if (cell >= 0 && !mesh.locate_index.empty()) {
    for (int32_t t : mesh.locate_index[static_cast<size_t>(cell)])
      if (point_in_closed_tri(mesh, t, p)) return t;
    return std::nullopt;
  }
  for (int32_t t = 0; t < static_cast<int32_t>(mesh.triangles.size()); ++t)
    if (point_in_closed_tri(mesh, t, p)) return t;
  return std::nullopt;
}

Circle min_cover_circle(const TriMesh& mesh, int32_t tri, Vec2 p) {
  if (tri < 0 || tri >= static_cast<int32_t>(mesh.triangles.size()))
    throw std::invalid_argument("min_cover_circle: triangle index out of range");
  if (!point_in_closed_tri(mesh, tri, p))
    throw std::invalid_argument("min_cover_circle: point outside the triangle");
  double r = 0.0;
  for (int k = 0; k < 3; ++k) r = std::max(r, distance(p, mesh.vertex(tri, k)));
  // Distance to any vertex is bounded by that vertex's longest incident edge.
  if (r > mesh.h_max + 1e-9 * std::max(1.0, mesh.h_max))
    throw std::logic_error("min_cover_circle: radius exceeds the mesh edge bound");
  return Circle{p, r};
}

}  // namespace heatcover
