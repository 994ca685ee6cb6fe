#include "heatcover/mission.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatcover {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Algo1:
      return "algo1";
    case Algorithm::Algo3:
      return "algo3";
    case Algorithm::Centralized:
      return "centralized";
  }
  return "unknown";
}

namespace {
constexpr long kStallSteps = 1000;  // consecutive steps without any workload decrease
}

struct MissionEngine::State {
  MissionConfig cfg;
  Recorder* rec = nullptr;

  RegionGrid grid;
  std::shared_ptr<const CellSet> all_cells;
  WorkloadField work;
  std::vector<AgentState> agents;
  Partition part;
  std::vector<std::shared_ptr<const CellSet>> sets;
  std::vector<double> eps_region;

  std::vector<ControlMode> modes;
  std::vector<std::optional<TriMesh>> meshes;
  std::vector<uint8_t> mesh_failed;
  std::vector<uint8_t> was_captured;
  std::vector<uint8_t> done_logged;
  std::vector<std::vector<double>> warm;
  std::vector<double> warm_global;
  std::vector<uint8_t> snapped;

  double t = 0.0, tp = 0.0;
  int k = 1;
  long steps = 0;
  long stall = 0;
  double M_inc = 0.0, M_rec = 0.0;
  std::vector<double> M_agent;
  double eps_tri = 0.0;

  RunSummary sum;
  bool over = false;
  IterationRecord cur_it;
  bool it_open = false;

  struct AgentStepInfo {
    char phase = 'R';
    double u_norm = 0.0;
  };
  std::vector<AgentStepInfo> step_info;

  // ---- setup ----------------------------------------------------------

  void init(const MissionConfig& c, Recorder* r) {
    cfg = c;
    rec = r;
    if (cfg.agent_count() < 1) throw std::invalid_argument("mission: need at least one agent");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("mission: dt must be positive");
    if (cfg.T_u < 0.0) throw std::invalid_argument("mission: T_u must be nonnegative");
    if (cfg.k_max < 1) throw std::invalid_argument("mission: k_max must be at least 1");
    if (cfg.eps_M < 0.0) throw std::invalid_argument("mission: eps_M must be nonnegative");
    if (cfg.max_steps < 1) throw std::invalid_argument("mission: max_steps must be positive");
    if (!(cfg.agent_speed > 0.0)) throw std::invalid_argument("mission: agent speed must be positive");
    if (!(cfg.mesh_edge() < cfg.kernel.r))
      throw std::invalid_argument("mission: mesh max edge must be smaller than the coverage radius");

    grid = build_region(cfg.region);
    all_cells = std::make_shared<CellSet>(CellSet::of(grid, grid.masked_cells()));
    work = initial_workload(grid, cfg.workload);
    for (const Vec2& p : cfg.initial_positions) {
      const int32_t c0 = grid.cell_of(p);
      if (c0 < 0 || !grid.masked_in(c0))
        throw std::invalid_argument("mission: initial position outside the workspace");
    }
    const int n = cfg.agent_count();
    for (int i = 0; i < n; ++i)
      agents.push_back(AgentState{i, cfg.initial_positions[static_cast<size_t>(i)],
                                  cfg.agent_speed, cfg.kernel, nullptr});
    eps_tri = 1e-6 * grid.cell_area() * cfg.kernel.P;

    sum.algorithm = cfg.algorithm;
    sum.M0 = work.initial_total;
    sum.v = coverage_speed(cfg.kernel);
    sum.T_star = optimal_time(sum.M0, n, sum.v);

    M_inc = M_rec = sum.M0;
    M_agent.assign(static_cast<size_t>(n), 0.0);
    step_info.assign(static_cast<size_t>(n), {});
    modes.assign(static_cast<size_t>(n), {});
    meshes.assign(static_cast<size_t>(n), std::nullopt);
    mesh_failed.assign(static_cast<size_t>(n), 0);
    was_captured.assign(static_cast<size_t>(n), 0);
    done_logged.assign(static_cast<size_t>(n), 0);
    warm.assign(static_cast<size_t>(n), {});
    snapped.assign(static_cast<size_t>(n), 0);
    if (rec) {
      rec->nx = grid.nx;
      rec->ny = grid.ny;
    }
  }

  void event(const std::string& kind, const std::string& detail) {
    sum.events.push_back(Event{t, k, kind, detail});
  }

  void recompute_totals() {
    const double a = grid.cell_area();
    double total = 0.0;
    std::fill(M_agent.begin(), M_agent.end(), 0.0);
    for (int32_t c : all_cells->cells) {
      const double m = work.field.values[static_cast<size_t>(c)];
      total += m;
      if (!part.owner.empty()) {
        const int32_t o = part.owner[static_cast<size_t>(c)];
        if (o >= 0) M_agent[static_cast<size_t>(o)] += m;
      }
    }
    M_rec = total * a;
    for (double& m : M_agent) m *= a;
  }

  void partition_now() {
    std::vector<Vec2> pos;
    pos.reserve(agents.size());
    for (const AgentState& a : agents) pos.push_back(a.position);
    part = voronoi_labels(grid, pos);
    sets.clear();
    eps_region.clear();
    for (int i = 0; i < part.agent_count; ++i) {
      sets.push_back(std::make_shared<CellSet>(
          CellSet::of(grid, part.cells[static_cast<size_t>(i)])));
      agents[static_cast<size_t>(i)].subregion = sets.back();
      eps_region.push_back(cfg.eps_M * sets.back()->count() / grid.masked_count);
    }
    std::fill(mesh_failed.begin(), mesh_failed.end(), 0);
    std::fill(was_captured.begin(), was_captured.end(), 0);
    std::fill(done_logged.begin(), done_logged.end(), 0);
    std::fill(snapped.begin(), snapped.end(), 0);
    for (auto& m : meshes) m.reset();
    for (auto& w : warm) w.clear();
    modes.assign(agents.size(), {});
    recompute_totals();
    if (rec && rec->want_partition) {
      Recorder::RasterSnap snap;
      snap.k = k;
      snap.labels.assign(static_cast<size_t>(grid.size()), -1);
      for (int32_t c = 0; c < grid.size(); ++c) {
        const int32_t o = part.owner[static_cast<size_t>(c)];
        if (o >= 0) snap.labels[static_cast<size_t>(c)] = o + 1;
      }
      rec->partitions.push_back(std::move(snap));
    }
  }

  // ---- logging --------------------------------------------------------

  void log_curve_row() {
    if (!rec) return;
    CurveRow row;
    row.t = t;
    row.M = M_rec;
    if (!part.owner.empty()) row.M_per_agent = M_agent;
    rec->curve.push_back(std::move(row));
    const double rel = std::abs(M_inc - M_rec) / std::max(sum.M0, 1.0);
    sum.accounting_max_rel_err = std::max(sum.accounting_max_rel_err, rel);
  }

  void log_trajectory_rows() {
    if (!rec) return;
    for (size_t i = 0; i < agents.size(); ++i)
      rec->trajectory.push_back(TrajectoryRow{t, k, agents[i].id, agents[i].position.x,
                                              agents[i].position.y, step_info[i].phase,
                                              step_info[i].u_norm});
  }

  void log_initial() {
    for (auto& si : step_info) si = {};
    log_trajectory_rows();
    log_curve_row();
  }

  void snapshot_field(int agent_id, const ScalarField& T) {
    if (!rec || !rec->want_fields) return;
    Recorder::FieldSnap snap;
    snap.k = k;
    snap.agent = agent_id;
    snap.t = t;
    snap.values = T.values;
    snap.defined.assign(static_cast<size_t>(grid.size()), 0);
    for (int32_t c : T.cells->cells) snap.defined[static_cast<size_t>(c)] = 1;
    rec->fields.push_back(std::move(snap));
  }

  // ---- per-agent controllers ------------------------------------------

  void realtime_agent(size_t i) {
    AgentState& a = agents[i];
    step_info[i] = {'R', 0.0};
    if (!a.subregion || a.subregion->cells.empty()) return;  // nothing to do
    const std::vector<double>* warm_in = warm[i].empty() ? nullptr : &warm[i];
    const StepResult res =
        realtime_update_step(a, work, cfg.field, cfg.dt, warm_in, &warm[i], &sum.solver);
    step_info[i].u_norm = norm(res.u);
    if (it_open) ++cur_it.field_solves;
    if (rec && rec->want_fields && !snapped[i]) {
      ScalarField T = ScalarField::zeros(grid, a.subregion);
      for (size_t j = 0; j < a.subregion->cells.size(); ++j)
        T.values[static_cast<size_t>(a.subregion->cells[j])] = warm[i][j];
      snapshot_field(a.id, T);
      snapped[i] = 1;
    }
  }

  void maximal_agent(size_t i) {
    AgentState& a = agents[i];
    if (!a.subregion || a.subregion->cells.empty()) {
      step_info[i] = {'M', 0.0};
      return;
    }
    modes[i].phase = ControlPhase::Maximal;
    if (!meshes[i] && !mesh_failed[i]) {
      try {
        const int32_t here = grid.cell_of(a.position);
        const CellSet comp = component_containing(grid, *a.subregion, here);
        meshes[i] = delaunay_triangulate(grid, comp, cfg.mesh_edge(), a.kernel.r);
      } catch (const std::exception& e) {
        mesh_failed[i] = 1;
        event("mesh_failed", "agent " + std::to_string(a.id) + ": " + e.what());
      }
    }
    if (mesh_failed[i]) {  // fall back to real-time stepping for this iteration
      realtime_agent(i);
      step_info[i].phase = 'M';
      return;
    }

    const MaximalResult res =
        maximal_update_step(a, modes[i], work, *meshes[i], cfg.field, cfg.dt, eps_tri, &sum.solver);
    step_info[i] = {'M', norm(res.u)};
    if (it_open && res.resolved) ++cur_it.field_solves;
    if (res.resolved) {
      event("field_frozen", "agent " + std::to_string(a.id) + ", " +
                                std::to_string(modes[i].target_maxima.size()) + " maxima");
      if (rec && rec->want_fields && modes[i].frozen_field) snapshot_field(a.id, *modes[i].frozen_field);
    }
    if (res.captured && !was_captured[i]) {
      event("triangle_captured",
            "agent " + std::to_string(a.id) + ", triangle " +
                std::to_string(modes[i].captured_triangle ? *modes[i].captured_triangle : -1));
    }
    was_captured[i] = res.captured ? 1 : 0;
    if (res.cleared_triangle)
      event("triangle_cleared", "agent " + std::to_string(a.id));
    if (res.done && !done_logged[i]) {
      event("subregion_done", "agent " + std::to_string(a.id));
      done_logged[i] = 1;
    }
  }

  void centralized_step() {
    const ScalarField h = heat_source(work, all_cells);
    const std::vector<double>* warm_in = warm_global.empty() ? nullptr : &warm_global;
    const ScalarField T = solve_heat_field(h, cfg.field, warm_in, &sum.solver);
    warm_global.resize(all_cells->cells.size());
    for (size_t j = 0; j < all_cells->cells.size(); ++j)
      warm_global[j] = T.values[static_cast<size_t>(all_cells->cells[j])];
    for (size_t i = 0; i < agents.size(); ++i) {
      AgentState& a = agents[i];
      const Vec2 u = control_input(T, a.position, a.speed);
      a.position = step_agent(a.position, u, cfg.dt, grid, *all_cells);
      step_info[i] = {'R', norm(u)};
    }
  }

  // ---- lockstep core ---------------------------------------------------

  enum class StepKind { Realtime, Algo2, Centralized };

  void step_once(StepKind kind) {
    const bool maximal_now =
        kind == StepKind::Algo2 && tp > cfg.realtime_duration(k) + 1e-12;
    if (kind == StepKind::Centralized) {
      centralized_step();
    } else {
      for (size_t i = 0; i < agents.size(); ++i) {
        if (maximal_now)
          maximal_agent(i);
        else
          realtime_agent(i);
      }
    }
    const double cleared = apply_coverage_step(work, agents, cfg.dt);
    M_inc -= cleared;
    stall = cleared > 0.0 ? 0 : stall + 1;
    t += cfg.dt;
    tp += cfg.dt;
    ++steps;
    if (it_open) {
      if (maximal_now)
        ++cur_it.maximal_steps;
      else
        ++cur_it.realtime_steps;
    }
    recompute_totals();
    log_trajectory_rows();
    if (rec && cfg.output.sample_stride > 0 && steps % cfg.output.sample_stride == 0)
      log_curve_row();
  }

  void finish_completed() {
    over = true;
    sum.completed = true;
    sum.T = t;
    event("mission_complete", "M=" + std::to_string(M_rec));
    log_curve_row();
  }

  void finish_aborted(const std::string& reason) {
    over = true;
    sum.completed = false;
    sum.abort_reason = reason;
    sum.T = t;
    event("mission_aborted", reason);
    log_curve_row();
  }

  void realtime_phase_loop(StepKind kind) {
    while (!over) {
      if (M_rec <= cfg.eps_M) {
        finish_completed();
        return;
      }
      if (steps >= cfg.max_steps) {
        finish_aborted("max_steps reached with workload remaining");
        return;
      }
      if (stall >= kStallSteps) {
        finish_aborted("stall: no workload decrease for 1000 steps");
        return;
      }
      step_once(kind);
    }
  }

  // ---- Algorithm 2 / 3 -------------------------------------------------

  void open_iteration() {
    cur_it = IterationRecord{};
    cur_it.k = k;
    cur_it.t_start = t;
    cur_it.M_start = M_rec;
    it_open = true;
    event("iteration_start", "k=" + std::to_string(k));
  }

  void close_iteration(int finisher) {
    cur_it.t_end = t;
    cur_it.M_end = M_rec;
    cur_it.finisher = finisher;
    sum.iterations.push_back(cur_it);
    it_open = false;
    if (finisher >= 0)
      event("iteration_end", "k=" + std::to_string(k) + ", finisher agent " + std::to_string(finisher));
  }

  int find_finisher() const {
    for (size_t i = 0; i < agents.size(); ++i) {
      if (M_agent[i] <= eps_region[i]) return static_cast<int>(i);
      if (modes[i].subregion_done) return static_cast<int>(i);
    }
    return -1;
  }

  int run_algo2_iteration() {
    open_iteration();
    stall = 0;
    if (M_rec <= cfg.eps_M) {
      finish_completed();
      close_iteration(-1);
      return -1;
    }
    int finisher = find_finisher();
    if (finisher >= 0) {  // a subregion is already clear
      close_iteration(finisher);
      return finisher;
    }
    while (true) {
      if (steps >= cfg.max_steps) {
        finish_aborted("max_steps reached with workload remaining");
        close_iteration(-1);
        return -1;
      }
      if (stall >= kStallSteps) {
        // Abort just the iteration; the handoff re-partition may unstick it.
        finisher = 0;
        for (size_t i = 1; i < agents.size(); ++i)
          if (M_agent[i] < M_agent[static_cast<size_t>(finisher)]) finisher = static_cast<int>(i);
        event("iteration_stalled", "no workload decrease for 1000 steps; forcing handoff");
        close_iteration(finisher);
        return finisher;
      }
      step_once(StepKind::Algo2);
      if (M_rec <= cfg.eps_M) {
        finish_completed();
        close_iteration(-1);
        return -1;
      }
      finisher = find_finisher();
      if (finisher >= 0) {
        close_iteration(finisher);
        return finisher;
      }
    }
  }

  void handoff(int finisher) {
    if (finisher < 0 || finisher >= static_cast<int>(agents.size()))
      throw std::invalid_argument("handoff: bad finisher id");
    work.snapshot_iteration_initial();

    const double a = grid.cell_area();
    std::vector<double> rem(agents.size(), 0.0);
    for (size_t j = 0; j < agents.size(); ++j) {
      for (int32_t c : part.cells[j]) rem[j] += work.iter_initial[static_cast<size_t>(c)];
      rem[j] *= a;
    }
    int target = -1;
    for (size_t j = 0; j < agents.size(); ++j) {
      if (static_cast<int>(j) == finisher) continue;
      if (!part.adjacent(finisher, static_cast<int>(j))) continue;
      if (rem[j] > 0.0 && (target < 0 || rem[j] > rem[static_cast<size_t>(target)]))
        target = static_cast<int>(j);
    }
    if (target < 0) {  // no neighbor holds workload: fall back to the global argmax subregion
      target = 0;
      for (size_t j = 1; j < agents.size(); ++j)
        if (rem[j] > rem[static_cast<size_t>(target)]) target = static_cast<int>(j);
    }

    int32_t best_cell = -1;
    double best_m = -1.0;
    for (int32_t c : part.cells[static_cast<size_t>(target)]) {
      const double m = work.iter_initial[static_cast<size_t>(c)];
      if (m > best_m) {
        best_m = m;
        best_cell = c;
      }
    }
    if (best_cell < 0) throw std::logic_error("handoff: target subregion is empty");
    agents[static_cast<size_t>(finisher)].position = grid.center(best_cell);
    event("handoff", "agent " + std::to_string(finisher) + " -> subregion of agent " +
                         std::to_string(target));

    ++k;
    tp = 0.0;
    partition_now();
  }

  RunSummary run() {
    switch (cfg.algorithm) {
      case Algorithm::Algo1:
        partition_now();
        log_initial();
        realtime_phase_loop(StepKind::Realtime);
        break;
      case Algorithm::Centralized:
        log_initial();
        realtime_phase_loop(StepKind::Centralized);
        break;
      case Algorithm::Algo3: {
        partition_now();
        log_initial();
        while (!over && k < cfg.k_max) {
          const int f = run_algo2_iteration();
          if (f < 0) break;
          handoff(f);
        }
        if (!over) {
          event("final_phase", "k=" + std::to_string(k) + ": per-subregion clearing");
          realtime_phase_loop(StepKind::Realtime);
        }
        break;
      }
    }
    sum.M_final = M_rec;
    sum.delta_T = sum.T - sum.T_star;
    sum.steps = steps;
    sum.iterations_run = k;
    return sum;
  }
};

MissionEngine::MissionEngine(const MissionConfig& cfg, Recorder* rec) : s_(new State) {
  s_->init(cfg, rec);
}
MissionEngine::~MissionEngine() = default;

RunSummary MissionEngine::run() { return s_->run(); }

int MissionEngine::run_algo2_iteration() {
  if (s_->part.owner.empty()) {
    s_->partition_now();
    s_->log_initial();
  }
  return s_->run_algo2_iteration();
}

void MissionEngine::handoff(int finisher) { s_->handoff(finisher); }

double MissionEngine::t() const { return s_->t; }
double MissionEngine::t_prime() const { return s_->tp; }
int MissionEngine::k() const { return s_->k; }
double MissionEngine::total_M() const { return s_->M_rec; }
const RegionGrid& MissionEngine::region() const { return s_->grid; }
const WorkloadField& MissionEngine::workload() const { return s_->work; }
const std::vector<AgentState>& MissionEngine::agents() const { return s_->agents; }
const Partition& MissionEngine::partition() const { return s_->part; }
const std::vector<Event>& MissionEngine::events() const { return s_->sum.events; }

RunSummary run_algo1(const MissionConfig& cfg, Recorder* rec) {
  MissionConfig c = cfg;
  c.algorithm = Algorithm::Algo1;
  return MissionEngine(c, rec).run();
}

RunSummary run_algo3(const MissionConfig& cfg, Recorder* rec) {
  MissionConfig c = cfg;
  c.algorithm = Algorithm::Algo3;
  return MissionEngine(c, rec).run();
}

RunSummary run_centralized(const MissionConfig& cfg, Recorder* rec) {
  MissionConfig c = cfg;
  c.algorithm = Algorithm::Centralized;
  return MissionEngine(c, rec).run();
}

RunSummary run_mission(const MissionConfig& cfg, Recorder* rec) {
  return MissionEngine(cfg, rec).run();
}

}  // namespace heatcover
