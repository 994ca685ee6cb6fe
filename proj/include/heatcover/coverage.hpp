#pragma once

#include <memory>
#include <span>
#include <vector>

#include "heatcover/field.hpp"
#include "heatcover/geometry.hpp"

namespace heatcover {

/// Exponential coverage kernel: rate P*exp(-lambda*d) inside the coverage
/// disc of radius r, zero outside.
struct CoverageKernel {
  double P = 6.0;       // max clearing rate, workload per time
  double lambda = 1.0;  // attenuation, 1/length
  double r = 0.5;       // effective coverage radius, length
};

double kernel_eval(const CoverageKernel& k, double d);

/// Closed-form disc integral of the kernel, 2*pi*P*(1-exp(-lr)(1+lr))/l^2,
/// with a series branch for small lambda*r (limit pi*P*r^2).
double coverage_speed(const CoverageKernel& k);

/// Midpoint-rule cross-check of coverage_speed on a grid of spacing h.
double coverage_speed_quadrature(const CoverageKernel& k, double h);

/// T* = M0 / (N * v).
double optimal_time(double M0, int N, double v);

struct MixtureTerm {
  double amplitude = 0.0;
  Vec2 center;
  double width = 1.0;  // m(x) += amplitude * exp(-|x-center|^2 / width)
};

struct AgentState {
  int id = 0;
  Vec2 position;
  double speed = 0.5;  // V_i, length per time
  CoverageKernel kernel;
  std::shared_ptr<const CellSet> subregion;
};

/// Remaining workload over the whole workspace. Values are nonnegative and
/// pointwise non-increasing in time; iter_initial snapshots the workload at
/// the start of the current iteration (the heat-source normalizer).
struct WorkloadField {
  ScalarField field;
  std::vector<double> iter_initial;
  double initial_total = 0.0;  // M(0)

  void snapshot_iteration_initial() { iter_initial = field.values; }
};

WorkloadField initial_workload(const RegionGrid& region, const std::vector<MixtureTerm>& mixture);

/// One explicit-Euler coverage step: m <- max(0, m - dt * sum_i p_i) on
/// every masked cell within some agent's coverage disc; cells beyond every
/// disc are untouched. Returns the cleared workload (times cell area).
double apply_coverage_step(WorkloadField& w, std::span<const AgentState> agents, double dt);

/// Midpoint-rule total over `cells`, or over the whole workspace when null.
double total_workload(const WorkloadField& w, const CellSet* cells = nullptr);

/// Heat source h = m / m_bar on `cells`, where m_bar is the maximum of the
/// iteration-initial workload over the same cells; identically zero when
/// m_bar <= 1e-12.
ScalarField heat_source(const WorkloadField& w, std::shared_ptr<const CellSet> cells);

}  // namespace heatcover
