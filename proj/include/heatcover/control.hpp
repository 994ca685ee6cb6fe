#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "heatcover/coverage.hpp"
#include "heatcover/field.hpp"
#include "heatcover/geometry.hpp"

namespace heatcover {

enum class ControlPhase { RealTime, Maximal };

/// Per-agent controller state. In Maximal phase the temperature field is
/// frozen between re-solves; target_maxima lists the frozen field's local
/// maxima (descending value) and target_triangles their mesh triangles.
struct ControlMode {
  ControlPhase phase = ControlPhase::RealTime;
  std::optional<ScalarField> frozen_field;
  std::vector<Vec2> target_maxima;
  std::vector<int32_t> target_triangles;  // -1 when a maximum is outside the mesh
  std::optional<int32_t> captured_triangle;
  bool subregion_done = false;
};

/// u = V * g / |g| with g the sampled temperature gradient at s; zero when
/// |g| <= 1e-12 (the agent holds position).
Vec2 control_input(const ScalarField& T, Vec2 s, double V);

/// Explicit Euler step s + dt*u, then projection onto the nearest point
/// whose containing cell belongs to `cells` (searched within 2 grid
/// spacings). Throws when no in-set cell is that close - a partition bug.
Vec2 step_agent(Vec2 s, Vec2 u, double dt, const RegionGrid& region, const CellSet& cells);

struct StepResult {
  Vec2 u;
  int solver_iterations = 0;
  bool resolved = false;  // a field solve happened this step
};

/// Real-time update: solve the subregion heat field from the current
/// workload, then follow its gradient. One solve per agent per step.
StepResult realtime_update_step(AgentState& agent, const WorkloadField& w,
                                const FieldParams& params, double dt,
                                const std::vector<double>* warm_start = nullptr,
                                std::vector<double>* warm_out = nullptr,
                                SolveStats* stats = nullptr);

struct MaximalResult {
  Vec2 u;
  bool resolved = false;        // froze a fresh field this step
  bool captured = false;        // currently holding inside a target triangle
  bool cleared_triangle = false;
  bool done = false;            // frozen field had no local maxima
  int solver_iterations = 0;
};

/// Maximal update: freeze the field once, walk its gradient to a local
/// maximum's triangle, hold until the triangle workload is cleared, then
/// unfreeze so the next call re-solves. Requires mesh.h_max < kernel r.
MaximalResult maximal_update_step(AgentState& agent, ControlMode& mode, const WorkloadField& w,
                                  const TriMesh& mesh, const FieldParams& params, double dt,
                                  double eps_tri, SolveStats* stats = nullptr);

}  // namespace heatcover
