#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace heatcover {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  // Open interior; points exactly on the boundary do not count.
  bool contains_open(Vec2 p) const {
    return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
};

struct RegionSpec {
  Rect outer;
  std::vector<Rect> holes;
  double spacing = 0.1;
};

/// Masked uniform grid over the workspace. mask[j*nx+i] is true when the
/// center of cell (i, j) lies inside the outer rectangle and outside all
/// holes. Integration over the workspace is the masked midpoint sum,
/// values times cell_area().
struct RegionGrid {
  Vec2 origin;           // lower-left corner of cell (0, 0)
  double spacing = 0.0;  // h_g
  int nx = 0, ny = 0;
  std::vector<uint8_t> mask;  // nx*ny, row-major (j*nx + i)
  int32_t masked_count = 0;

  int32_t size() const { return static_cast<int32_t>(nx) * ny; }
  int32_t idx(int i, int j) const { return static_cast<int32_t>(j) * nx + i; }
  int cell_i(int32_t c) const { return static_cast<int>(c % nx); }
  int cell_j(int32_t c) const { return static_cast<int>(c / nx); }
  bool in_grid(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  bool masked_in(int32_t c) const { return mask[static_cast<size_t>(c)] != 0; }
  double cell_area() const { return spacing * spacing; }

  Vec2 center(int i, int j) const {
    return {origin.x + (i + 0.5) * spacing, origin.y + (j + 0.5) * spacing};
  }
  Vec2 center(int32_t c) const { return center(cell_i(c), cell_j(c)); }

  /// Flat index of the cell containing p, or -1 outside the grid.
  /// Points exactly on an interior cell edge belong to the upper cell.
  int32_t cell_of(Vec2 p) const {
    int i = static_cast<int>(std::floor((p.x - origin.x) / spacing));
    int j = static_cast<int>(std::floor((p.y - origin.y) / spacing));
    return in_grid(i, j) ? idx(i, j) : -1;
  }

  std::vector<int32_t> masked_cells() const;
};

/// Subset of grid cells with O(1) membership.
struct CellSet {
  std::vector<int32_t> cells;   // ascending
  std::vector<uint8_t> member;  // grid-sized

  bool contains(int32_t c) const { return member[static_cast<size_t>(c)] != 0; }
  int32_t count() const { return static_cast<int32_t>(cells.size()); }

  static CellSet of(const RegionGrid& region, std::vector<int32_t> cells);
};

struct Partition {
  int agent_count = 0;
  std::vector<int32_t> owner;               // grid-sized; -1 = outside workspace
  std::vector<std::vector<int32_t>> cells;  // per agent, ascending
  std::vector<uint8_t> adjacency;           // N*N, w_ij

  bool adjacent(int i, int j) const {
    return adjacency[static_cast<size_t>(i) * agent_count + j] != 0;
  }
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

struct Triangle {
  int32_t v[3];
};

struct LatticePoint {
  int64_t x = 0;
  int64_t y = 0;
};

/// Triangle mesh over a subregion's cell set. Triangles are CCW,
/// non-degenerate and pairwise disjoint; h_max is the longest edge.
struct TriMesh {
  const RegionGrid* region = nullptr;
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  double h_max = 0.0;
  std::vector<std::vector<int32_t>> tri_cells;  // subregion cells per triangle
  int32_t uncovered_cells = 0;  // subregion cells not inside any kept triangle

  // Point-location acceleration: candidate triangles per grid cell,
  // ascending so the lowest-index tie rule falls out of the scan order.
  std::vector<std::vector<int32_t>> locate_index;

  Vec2 vertex(int32_t t, int corner) const { return vertices[triangles[t].v[corner]]; }
};

RegionGrid build_region(const RegionSpec& spec);

/// Nearest-site labels for every masked-in cell, ties to the smallest agent
/// index. adjacency is true iff two agents own a 4-adjacent cell pair.
Partition voronoi_labels(const RegionGrid& region, const std::vector<Vec2>& positions);

/// Delaunay triangulation of distinct lattice points using exact integer
/// predicates. Cocircular point sets keep the first diagonal encountered,
/// so the result is deterministic for a fixed input order.
std::vector<Triangle> delaunay_lattice(const std::vector<LatticePoint>& pts);

/// Mesh a 4-connected cell set: sample cell centers (boundary cells plus a
/// coarsened interior lattice), Delaunay-triangulate, then clip to the set
/// and drop triangles with edges longer than max_edge. Requires
/// max_edge < coverage_radius so that entering a triangle puts every point
/// of it inside the agent's coverage disc.
TriMesh delaunay_triangulate(const RegionGrid& region, const CellSet& cells,
                             double max_edge, double coverage_radius);

/// Triangle whose closed region contains p (lowest index on shared
/// edges/vertices), or nullopt if p lies outside all triangles.
std::optional<int32_t> locate_triangle(const TriMesh& mesh, Vec2 p);

/// Closed-triangle containment test.
bool triangle_contains(const TriMesh& mesh, int32_t tri, Vec2 p);

/// Circle centered on p covering the whole triangle: radius is the largest
/// distance from p to a vertex. p must lie in the closed triangle; the
/// radius never exceeds h_max.
Circle min_cover_circle(const TriMesh& mesh, int32_t tri, Vec2 p);

bool is_4connected(const RegionGrid& region, const std::vector<int32_t>& cells);

/// 4-connected component of `cells` containing seed_cell.
CellSet component_containing(const RegionGrid& region, const CellSet& cells, int32_t seed_cell);

}  // namespace heatcover
