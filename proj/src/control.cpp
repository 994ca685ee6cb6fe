#include "heatcover/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatcover {

Vec2 control_input(const ScalarField& T, Vec2 s, double V) {
  if (!(V > 0.0)) throw std::invalid_argument("control_input: speed must be positive");
  const Vec2 g = sample_gradient(T, s);
  const double n = norm(g);
  if (n <= 1e-12) return {0.0, 0.0};
  return g * (V / n);
}

Vec2 step_agent(Vec2 s, Vec2 u, double dt, const RegionGrid& region, const CellSet& cells) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_agent: non-positive dt");
  const Vec2 target = s + u * dt;
  const int32_t tc = region.cell_of(target);
  if (tc >= 0 && cells.contains(tc)) return target;

  // Project onto the nearest point of an in-set cell within 2 h_g. The
  // projected point is pulled a hair inside its cell so cell_of() keeps
  // assigning it there.
  const double h = region.spacing;
  const int ci = static_cast<int>(std::floor((target.x - region.origin.x) / h));
  const int cj = static_cast<int>(std::floor((target.y - region.origin.y) / h));
  const int w = 3;  // covers a 2 h_g search radius
  Vec2 best{};
  double best_d2 = -1.0;
  for (int j = cj - w; j <= cj + w; ++j) {
    for (int i = ci - w; i <= ci + w; ++i) {
      if (!region.in_grid(i, j)) continue;
      const int32_t c = region.idx(i, j);
      if (!cells.contains(c)) continue;
      const double nudge = 1e-9 * h;
      const double x0 = region.origin.x + i * h + nudge, x1 = region.origin.x + (i + 1) * h - nudge;
      const double y0 = region.origin.y + j * h + nudge, y1 = region.origin.y + (j + 1) * h - nudge;
      const Vec2 q{std::min(std::max(target.x, x0), x1), std::min(std::max(target.y, y0), y1)};
      const Vec2 d = q - target;
      const double d2 = dot(d, d);
      if (best_d2 < 0.0 || d2 < best_d2) {
        best_d2 = d2;
        best = q;
      }
    }
  }
  if (best_d2 < 0.0 || std::sqrt(best_d2) > 2.0 * h)
    throw std::runtime_error("step_agent: projection failed (no subregion cell within reach)");
  return best;
}

StepResult realtime_update_step(AgentState& agent, const WorkloadField& w,
                                const FieldParams& params, double dt,
                                const std::vector<double>* warm_start,
                                std::vector<double>* warm_out, SolveStats* stats) {
  if (!agent.subregion || agent.subregion->cells.empty())
    throw std::invalid_argument("realtime_update_step: agent has an empty subregion");
  const ScalarField h = heat_source(w, agent.subregion);
  SolveStats local;
  const ScalarField T = solve_heat_field(h, params, warm_start, &local);
  if (stats) {
    stats->calls += local.calls;
    stats->iterations += local.iterations;
    stats->max_iterations = std::max(stats->max_iterations, local.max_iterations);
  }
  if (warm_out) {
    warm_out->resize(agent.subregion->cells.size());
    for (size_t k = 0; k < agent.subregion->cells.size(); ++k)
      (*warm_out)[k] = T.values[static_cast<size_t>(agent.subregion->cells[k])];
  }
  StepResult out;
  out.resolved = true;
  out.solver_iterations = local.max_iterations;
  out.u = control_input(T, agent.position, agent.speed);
  agent.position = step_agent(agent.position, out.u, dt, *w.field.region, *agent.subregion);
  return out;
}

namespace {

double triangle_workload(const WorkloadField& w, const TriMesh& mesh, int32_t tri) {
  double s = 0.0;
  for (int32_t c : mesh.tri_cells[static_cast<size_t>(tri)])
    s += w.field.values[static_cast<size_t>(c)];
  return s * w.field.region->cell_area();
}

}  // namespace

MaximalResult maximal_update_step(AgentState& agent, ControlMode& mode, const WorkloadField& w,
                                  const TriMesh& mesh, const FieldParams& params, double dt,
                                  double eps_tri, SolveStats* stats) {
  if (mode.phase != ControlPhase::Maximal)
    throw std::invalid_argument("maximal_update_step: controller is not in Maximal phase");
  if (!(mesh.h_max < agent.kernel.r))
    throw std::invalid_argument("maximal_update_step: mesh edge bound violates the coverage radius");

  MaximalResult out;
  if (!mode.frozen_field) {
    const ScalarField h = heat_source(w, agent.subregion);
    SolveStats local;
    mode.frozen_field = solve_heat_field(h, params, nullptr, &local);
    if (stats) {
      stats->calls += local.calls;
      stats->iterations += local.iterations;
      stats->max_iterations = std::max(stats->max_iterations, local.max_iterations);
    }
    out.resolved = true;
    out.solver_iterations = local.max_iterations;
    mode.target_maxima = local_maxima(*mode.frozen_field);
    mode.target_triangles.clear();
    for (const Vec2& m : mode.target_maxima) {
      const std::optional<int32_t> t = locate_triangle(mesh, m);
      mode.target_triangles.push_back(t ? *t : -1);
    }
    mode.captured_triangle.reset();
    if (mode.target_maxima.empty()) {
      mode.subregion_done = true;
      out.done = true;
      return out;
    }
    mode.subregion_done = false;
  }

  // Capture test: the agent's current triangle geometrically contains one
  // of the frozen field's maxima (a maximum on a shared vertex or edge
  // belongs to every incident triangle). Entering any maximum's triangle
  // counts.
  const std::optional<int32_t> here = locate_triangle(mesh, agent.position);
  bool capture = false;
  if (here) {
    for (const Vec2& m : mode.target_maxima)
      if (triangle_contains(mesh, *here, m)) {
        capture = true;
        break;
      }
  }

  if (capture) {
    if (!mode.captured_triangle || *mode.captured_triangle != *here) {
      // Entry certificate: every vertex (hence the whole triangle) is
      // inside the coverage disc.
      const Circle cover = min_cover_circle(mesh, *here, agent.position);
      if (!(cover.radius < agent.kernel.r))
        throw std::logic_error("maximal_update_step: capture without full triangle coverage");
      mode.captured_triangle = *here;
    }
    out.captured = true;
    out.u = {0.0, 0.0};  // hold; the shared coverage step keeps clearing
    if (triangle_workload(w, mesh, *here) <= eps_tri) {
      mode.frozen_field.reset();  // next call re-solves and retargets
      mode.captured_triangle.reset();
      out.cleared_triangle = true;
    }
    return out;
  }

  mode.captured_triangle.reset();
  out.u = control_input(*mode.frozen_field, agent.position, agent.speed);
  agent.position = step_agent(agent.position, out.u, dt, *w.field.region, *agent.subregion);
  return out;
}

}  // namespace heatcover
