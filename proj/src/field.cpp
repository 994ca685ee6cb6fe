#include "heatcover/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatcover {

ScalarField ScalarField::zeros(const RegionGrid& region, std::shared_ptr<const CellSet> cells) {
  ScalarField f;
  f.region = &region;
  f.cells = std::move(cells);
  f.values.assign(static_cast<size_t>(region.size()), 0.0);
  return f;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (int32_t c : cells->cells) m = std::max(m, std::abs(values[static_cast<size_t>(c)]));
  return m;
}

bool ScalarField::constant_on_cells(double tol) const {
  if (cells->cells.empty()) return true;
  double lo = values[static_cast<size_t>(cells->cells.front())], hi = lo;
  for (int32_t c : cells->cells) {
    const double v = values[static_cast<size_t>(c)];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo <= tol;
}

namespace {

struct InterpStencil {
  int32_t corner[4];  // (i0,j0) (i1,j0) (i0,j1) (i1,j1) after substitution
  double fx = 0.0, fy = 0.0;
};

int32_t nearest_defined_cell(const ScalarField& f, Vec2 p) {
  const RegionGrid& g = *f.region;
  int32_t best = -1;
  double best_d2 = 0.0;
  for (int32_t c : f.cells->cells) {
    const Vec2 d = g.center(c) - p;
    const double d2 = dot(d, d);
    if (best < 0 || d2 < best_d2) {
      best = c;
      best_d2 = d2;
    }
  }
  if (best < 0) throw std::logic_error("scalar field has no defined cells");
  return best;
}

// Interpolation corners around p on the cell-center lattice. Corners
// outside the cell set borrow the nearest present corner of the same 2x2
// block (horizontal first, then vertical, then diagonal).
InterpStencil bilinear_stencil(const ScalarField& f, Vec2 p) {
  const RegionGrid& g = *f.region;
  const int32_t pc = g.cell_of(p);
  if (pc < 0 || !f.cells->contains(pc)) p = g.center(nearest_defined_cell(f, p));

  auto axis = [](double coord, double o, double h, int n, int& lo, double& frac) {
    double u = (coord - o) / h - 0.5;
    u = std::min(std::max(u, 0.0), static_cast<double>(n - 1));
    lo = std::min(static_cast<int>(std::floor(u)), std::max(n - 2, 0));
    frac = u - lo;
  };
  int i0, j0;
  InterpStencil s;
  axis(p.x, g.origin.x, g.spacing, g.nx, i0, s.fx);
  axis(p.y, g.origin.y, g.spacing, g.ny, j0, s.fy);
  const int i1 = std::min(i0 + 1, g.nx - 1), j1 = std::min(j0 + 1, g.ny - 1);

  const int32_t raw[4] = {g.idx(i0, j0), g.idx(i1, j0), g.idx(i0, j1), g.idx(i1, j1)};
  bool present[4];
  for (int k = 0; k < 4; ++k) present[k] = f.cells->contains(raw[k]);
  static constexpr int kPrefer[4][3] = {{1, 2, 3}, {0, 3, 2}, {3, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < 4; ++k) {
    if (present[k]) {
      s.corner[k] = raw[k];
      continue;
    }
    int32_t sub = -1;
    for (int alt : kPrefer[k])
      if (present[alt]) {
        sub = raw[alt];
        break;
      }
    if (sub < 0) throw std::logic_error("bilinear stencil has no defined corner");
    s.corner[k] = sub;
  }
  return s;
}

inline double blend(const InterpStencil& s, const double v[4]) {
  return (1.0 - s.fx) * (1.0 - s.fy) * v[0] + s.fx * (1.0 - s.fy) * v[1] +
         (1.0 - s.fx) * s.fy * v[2] + s.fx * s.fy * v[3];
}

Vec2 cell_gradient(const ScalarField& f, int32_t c) {
  const RegionGrid& g = *f.region;
  const int i = g.cell_i(c), j = g.cell_j(c);
  const double h = g.spacing;
  auto value = [&](int ii, int jj) -> const double* {
    if (!g.in_grid(ii, jj)) return nullptr;
    const int32_t n = g.idx(ii, jj);
    return f.cells->contains(n) ? &f.values[static_cast<size_t>(n)] : nullptr;
  };
  const double vc = f.values[static_cast<size_t>(c)];
  auto diff = [&](const double* lo, const double* hi) {
    if (lo && hi) return (*hi - *lo) / (2.0 * h);
    if (hi) return (*hi - vc) / h;
    if (lo) return (vc - *lo) / h;
    return 0.0;
  };
  return {diff(value(i - 1, j), value(i + 1, j)), diff(value(i, j - 1), value(i, j + 1))};
}

}  // namespace

double ScalarField::value_at(Vec2 p) const {
  const InterpStencil s = bilinear_stencil(*this, p);
  const double v[4] = {at(s.corner[0]), at(s.corner[1]), at(s.corner[2]), at(s.corner[3])};
  return blend(s, v);
}

Vec2 sample_gradient(const ScalarField& field, Vec2 p) {
  const InterpStencil s = bilinear_stencil(field, p);
  double gx[4], gy[4];
  for (int k = 0; k < 4; ++k) {
    const Vec2 gc = cell_gradient(field, s.corner[k]);
    gx[k] = gc.x;
    gy[k] = gc.y;
  }
  return {blend(s, gx), blend(s, gy)};
}

ScalarField solve_heat_field(const ScalarField& source, const FieldParams& params,
                             const std::vector<double>* warm_start, SolveStats* stats) {
  if (!(params.alpha > 0.0) || !(params.beta > 0.0) || !(params.solver_tol > 0.0))
    throw std::invalid_argument("solve_heat_field: alpha, beta and solver_tol must be positive");
  const RegionGrid& g = *source.region;
  const CellSet& set = *source.cells;
  const auto n = set.cells.size();

  std::vector<double> b(n);
  double b_norm2 = 0.0, b_max = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const double v = source.values[static_cast<size_t>(set.cells[k])];
    if (v < 0.0) throw std::invalid_argument("solve_heat_field: negative source");
    b[k] = v;
    b_norm2 += v * v;
    b_max = std::max(b_max, v);
  }
  ScalarField out = ScalarField::zeros(g, source.cells);
  if (stats) ++stats->calls;
  if (b_max == 0.0) return out;  // homogeneous SPD system: T is identically zero

  // Local 4-neighbor topology of the cell set.
  std::vector<int32_t> local(static_cast<size_t>(g.size()), -1);
  for (size_t k = 0; k < n; ++k) local[static_cast<size_t>(set.cells[k])] = static_cast<int32_t>(k);
  std::vector<int32_t> nbr(4 * n, -1);
  std::vector<double> diag(n);
  const double w = params.alpha / (g.spacing * g.spacing);
  for (size_t k = 0; k < n; ++k) {
    const int32_t c = set.cells[k];
    const int i = g.cell_i(c), j = g.cell_j(c);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    int deg = 0;
    for (int d = 0; d < 4; ++d) {
      const int ni = i + di[d], nj = j + dj[d];
      if (!g.in_grid(ni, nj)) continue;
      const int32_t ln = local[static_cast<size_t>(g.idx(ni, nj))];
      if (ln >= 0) {
        nbr[4 * k + static_cast<size_t>(d)] = ln;
        ++deg;
      }
    }
    diag[k] = params.beta + w * deg;
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (size_t k = 0; k < n; ++k) {
      double acc = diag[k] * x[k];
      for (int d = 0; d < 4; ++d) {
        const int32_t ln = nbr[4 * k + static_cast<size_t>(d)];
        if (ln >= 0) acc -= w * x[static_cast<size_t>(ln)];
      }
      y[k] = acc;
    }
  };

  std::vector<double> x(n, 0.0), r(n), z(n), p(n), ap(n);
  if (warm_start && warm_start->size() == n) x = *warm_start;

  apply(x, ap);
  for (size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
  for (size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
  p = z;
  double rz = 0.0, r_norm2 = 0.0;
  for (size_t k = 0; k < n; ++k) {
    rz += r[k] * z[k];
    r_norm2 += r[k] * r[k];
  }
  const double target = params.solver_tol * (std::sqrt(b_norm2) + 1.0);

  int it = 0;
  while (std::sqrt(r_norm2) > target) {
    if (it++ >= params.solver_max_iter)
      throw std::runtime_error("solve_heat_field: solver failed to converge");
    apply(p, ap);
    double pap = 0.0;
    for (size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
    const double step = rz / pap;
    for (size_t k = 0; k < n; ++k) {
      x[k] += step * p[k];
      r[k] -= step * ap[k];
    }
    double rz_next = 0.0;
    r_norm2 = 0.0;
    for (size_t k = 0; k < n; ++k) {
      z[k] = r[k] / diag[k];
      rz_next += r[k] * z[k];
      r_norm2 += r[k] * r[k];
    }
    const double dir = rz_next / rz;
    for (size_t k = 0; k < n; ++k) p[k] = z[k] + dir * p[k];
    rz = rz_next;
  }
  if (stats) {
    stats->iterations += it;
    stats->max_iterations = std::max(stats->max_iterations, it);
  }

  // The exact solution is nonnegative (M-matrix inverse); strip solver noise.
  for (size_t k = 0; k < n; ++k)
    out.values[static_cast<size_t>(set.cells[k])] = std::max(0.0, x[k]);
  return out;
}

std::vector<Vec2> local_maxima(const ScalarField& field) {
  const RegionGrid& g = *field.region;
  const CellSet& set = *field.cells;
  if (set.cells.empty()) return {};

  std::vector<std::pair<double, int32_t>> found;
  double vmax = field.at(set.cells.front()), vmin = vmax;
  int32_t argmax = set.cells.front();
  for (int32_t c : set.cells) {
    const double vc = field.at(c);
    if (vc > vmax) {
      vmax = vc;
      argmax = c;
    }
    vmin = std::min(vmin, vc);

    bool ge_all = true, gt_one = false;
    const int i = g.cell_i(c), j = g.cell_j(c);
    for (int dj = -1; dj <= 1 && ge_all; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ni = i + di, nj = j + dj;
        if (!g.in_grid(ni, nj)) continue;
        const int32_t nc = g.idx(ni, nj);
        if (!set.contains(nc)) continue;
        const double vn = field.at(nc);
        if (vn > vc) {
          ge_all = false;
          break;
        }
        if (vn < vc) gt_one = true;
      }
    }
    if (ge_all && gt_one) found.emplace_back(vc, c);
  }

  if (vmax == vmin) return {};  // constant field
  bool has_argmax = false;
  for (const auto& [v, c] : found)
    if (c == argmax) has_argmax = true;
  if (!has_argmax) found.emplace_back(vmax, argmax);

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<Vec2> pts;
  pts.reserve(found.size());
  for (const auto& [v, c] : found) pts.push_back(g.center(c));
  return pts;
}

std::optional<Hessian2> hessian_at(const ScalarField& field, int32_t cell) {
  const RegionGrid& g = *field.region;
  const int i = g.cell_i(cell), j = g.cell_j(cell);
  auto v = [&](int ii, int jj) -> std::optional<double> {
    if (!g.in_grid(ii, jj)) return std::nullopt;
    const int32_t c = g.idx(ii, jj);
    if (!field.cells->contains(c)) return std::nullopt;
    return field.at(c);
  };
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di)
      if (!v(i + di, j + dj)) return std::nullopt;

  const double h2 = g.spacing * g.spacing;
  Hessian2 out;
  out.xx = (*v(i + 1, j) - 2.0 * *v(i, j) + *v(i - 1, j)) / h2;
  out.yy = (*v(i, j + 1) - 2.0 * *v(i, j) + *v(i, j - 1)) / h2;
  out.xy = (*v(i + 1, j + 1) - *v(i - 1, j + 1) - *v(i + 1, j - 1) + *v(i - 1, j - 1)) / (4.0 * h2);
  return out;
}

bool negative_definite(const Hessian2& h, double eps) {
  const double tr = h.xx + h.yy;
  const double disc = std::sqrt((h.xx - h.yy) * (h.xx - h.yy) + 4.0 * h.xy * h.xy);
  const double lambda_max = 0.5 * (tr + disc);
  return lambda_max < -eps;
}

}  // namespace heatcover
