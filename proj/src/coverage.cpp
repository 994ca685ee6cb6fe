#include "heatcover/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatcover {

namespace {

void validate_kernel(const CoverageKernel& k) {
  if (!(k.P > 0.0) || !(k.lambda > 0.0) || !(k.r > 0.0))
    throw std::invalid_argument("coverage kernel parameters must be positive");
}

}  // namespace

double kernel_eval(const CoverageKernel& k, double d) {
  validate_kernel(k);
  if (d < 0.0) throw std::invalid_argument("kernel_eval: negative distance");
  if (d > k.r) return 0.0;
  return k.P * std::exp(-k.lambda * d);
}

double coverage_speed(const CoverageKernel& k) {
  validate_kernel(k);
  const double lr = k.lambda * k.r;
  if (lr < 1e-4) {
    // series of int_0^r rho*exp(-l*rho) drho around l = 0
    const double r2 = k.r * k.r;
    const double s = r2 / 2.0 - k.lambda * r2 * k.r / 3.0 + k.lambda * k.lambda * r2 * r2 / 8.0 -
                     k.lambda * k.lambda * k.lambda * r2 * r2 * k.r / 30.0;
    return 2.0 * std::numbers::pi * k.P * s;
  }
  return 2.0 * std::numbers::pi * k.P * (1.0 - std::exp(-lr) * (1.0 + lr)) / (k.lambda * k.lambda);
}

double coverage_speed_quadrature(const CoverageKernel& k, double h) {
  validate_kernel(k);
  if (!(h > 0.0)) throw std::invalid_argument("coverage_speed_quadrature: non-positive spacing");
  const int n = static_cast<int>(std::ceil(k.r / h)) + 1;
  double s = 0.0;
  for (int j = -n; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) {
      const double x = (i + 0.5) * h, y = (j + 0.5) * h;
      const double d = std::sqrt(x * x + y * y);
      if (d <= k.r) s += k.P * std::exp(-k.lambda * d);
    }
  }
  return s * h * h;
}

double optimal_time(double M0, int N, double v) {
  if (N < 1) throw std::invalid_argument("optimal_time: need at least one agent");
  if (!(v > 0.0)) throw std::invalid_argument("optimal_time: coverage speed must be positive");
  return M0 / (N * v);
}

WorkloadField initial_workload(const RegionGrid& region, const std::vector<MixtureTerm>& mixture) {
  for (const MixtureTerm& t : mixture) {
    if (t.amplitude < 0.0) throw std::invalid_argument("initial_workload: negative amplitude");
    if (!(t.width > 0.0)) throw std::invalid_argument("initial_workload: non-positive width");
  }
  auto cells = std::make_shared<CellSet>(CellSet::of(region, region.masked_cells()));
  WorkloadField w;
  w.field = ScalarField::zeros(region, cells);
  for (int32_t c : cells->cells) {
    const Vec2 x = region.center(c);
    double m = 0.0;
    for (const MixtureTerm& t : mixture) {
      const Vec2 d = x - t.center;
      m += t.amplitude * std::exp(-dot(d, d) / t.width);
    }
    w.field.values[static_cast<size_t>(c)] = m;
  }
  w.initial_total = total_workload(w);
  w.snapshot_iteration_initial();
  return w;
}

double apply_coverage_step(WorkloadField& w, std::span<const AgentState> agents, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("apply_coverage_step: non-positive dt");
  const RegionGrid& g = *w.field.region;
  const double h = g.spacing;

  // Accumulate the summed rate over all agents before clamping, so
  // overlapping discs combine as one Euler step.
  static thread_local std::vector<double> rate;
  static thread_local std::vector<int32_t> touched;
  rate.assign(static_cast<size_t>(g.size()), 0.0);
  touched.clear();

  for (const AgentState& a : agents) {
    const double r = a.kernel.r;
    const int i0 = std::max(0, static_cast<int>(std::floor((a.position.x - r - g.origin.x) / h)));
    const int i1 = std::min(g.nx - 1, static_cast<int>(std::floor((a.position.x + r - g.origin.x) / h)));
    const int j0 = std::max(0, static_cast<int>(std::floor((a.position.y - r - g.origin.y) / h)));
    const int j1 = std::min(g.ny - 1, static_cast<int>(std::floor((a.position.y + r - g.origin.y) / h)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const int32_t c = g.idx(i, j);
        if (!g.masked_in(c)) continue;
        const double d = distance(g.center(c), a.position);
        if (d > r) continue;
        if (rate[static_cast<size_t>(c)] == 0.0) touched.push_back(c);
        rate[static_cast<size_t>(c)] += a.kernel.P * std::exp(-a.kernel.lambda * d);
      }
    }
  }

  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  double cleared = 0.0;
  for (int32_t c : touched) {
    const double old = w.field.values[static_cast<size_t>(c)];
    const double next = std::max(0.0, old - dt * rate[static_cast<size_t>(c)]);
    w.field.values[static_cast<size_t>(c)] = next;
    cleared += old - next;
  }
  return cleared * g.cell_area();
}

double total_workload(const WorkloadField& w, const CellSet* cells) {
  const RegionGrid& g = *w.field.region;
  double s = 0.0;
  if (cells) {
    for (int32_t c : cells->cells) s += w.field.values[static_cast<size_t>(c)];
  } else {
    for (int32_t c : w.field.cells->cells) s += w.field.values[static_cast<size_t>(c)];
  }
  return s * g.cell_area();
}

ScalarField heat_source(const WorkloadField& w, std::shared_ptr<const CellSet> cells) {
  if (!cells || cells->cells.empty()) throw std::invalid_argument("heat_source: empty cell set");
  const RegionGrid& g = *w.field.region;
  double m_bar = 0.0;
  for (int32_t c : cells->cells) m_bar = std::max(m_bar, w.iter_initial[static_cast<size_t>(c)]);
  ScalarField h = ScalarField::zeros(g, std::move(cells));
  if (m_bar <= 1e-12) return h;
  for (int32_t c : h.cells->cells)
    h.values[static_cast<size_t>(c)] = w.field.values[static_cast<size_t>(c)] / m_bar;
  return h;
}

}  // namespace heatcover
