#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "heatcover/control.hpp"
#include "heatcover/coverage.hpp"
#include "heatcover/field.hpp"
#include "heatcover/geometry.hpp"

namespace heatcover {

enum class Algorithm { Algo1, Algo3, Centralized };

const char* algorithm_name(Algorithm a);

struct OutputOptions {
  std::string directory = "out";
  bool trajectory = true;
  bool workload_curve = true;
  bool partition_raster = false;
  bool field_snapshots = false;
  bool summary = true;
  int sample_stride = 10;
};

struct MissionConfig {
  RegionSpec region;
  std::vector<MixtureTerm> workload;
  std::vector<Vec2> initial_positions;
  double agent_speed = 0.5;
  CoverageKernel kernel;
  FieldParams field;

  Algorithm algorithm = Algorithm::Algo3;
  double dt = 0.1;
  double T_u = 500.0;
  std::vector<double> T_u_per_iteration;  // optional; overrides T_u per k
  int k_max = 7;
  double eps_M = 1e-3;      // mission-complete threshold on M(t)
  long max_steps = 50000;
  double mesh_max_edge = 0.0;  // 0 = default 0.9 * kernel.r
  uint64_t seed = 0;
  OutputOptions output;

  int agent_count() const { return static_cast<int>(initial_positions.size()); }
  double mesh_edge() const { return mesh_max_edge > 0.0 ? mesh_max_edge : 0.9 * kernel.r; }
  double realtime_duration(int k) const {
    if (T_u_per_iteration.empty()) return T_u;
    const size_t i = std::min(static_cast<size_t>(k - 1), T_u_per_iteration.size() - 1);
    return T_u_per_iteration[i];
  }
};

struct Event {
  double t = 0.0;
  int k = 0;
  std::string kind;
  std::string detail;
};

struct IterationRecord {
  int k = 0;
  double t_start = 0.0, t_end = 0.0;
  int finisher = -1;  // -1 when the run ended mid-iteration
  double M_start = 0.0, M_end = 0.0;
  long realtime_steps = 0, maximal_steps = 0;
  long field_solves = 0;
};

struct TrajectoryRow {
  double t = 0.0;
  int k = 0;
  int agent = 0;
  double x = 0.0, y = 0.0;
  char phase = 'R';  // 'R' real-time, 'M' maximal
  double u_norm = 0.0;
};

struct CurveRow {
  double t = 0.0;
  double M = 0.0;
  std::vector<double> M_per_agent;  // empty for the centralized baseline
};

/// In-memory artifact sink filled during a run; self-contained so it can be
/// serialized after the engine is gone.
struct Recorder {
  int nx = 0, ny = 0;
  std::vector<TrajectoryRow> trajectory;
  std::vector<CurveRow> curve;

  struct RasterSnap {
    int k = 0;
    std::vector<int32_t> labels;  // 1-based owner, -1 outside the workspace
  };
  struct FieldSnap {
    int k = 0;
    int agent = 0;
    double t = 0.0;
    std::vector<double> values;
    std::vector<uint8_t> defined;
  };
  bool want_partition = false;
  bool want_fields = false;
  std::vector<RasterSnap> partitions;
  std::vector<FieldSnap> fields;
};

struct RunSummary {
  Algorithm algorithm = Algorithm::Algo1;
  bool completed = false;
  std::string abort_reason;  // set when completed is false
  double T = 0.0;            // actual coverage time (final t when incomplete)
  double T_star = 0.0;
  double delta_T = 0.0;
  double M0 = 0.0;
  double v = 0.0;
  double M_final = 0.0;
  long steps = 0;
  int iterations_run = 0;
  SolveStats solver;
  std::vector<IterationRecord> iterations;
  std::vector<Event> events;
  double accounting_max_rel_err = 0.0;  // incremental vs recomputed M, per M(0)
};

/// Lockstep simulation engine: per-step controller phase (agents in id
/// order), one shared coverage update, then accounting and logging. All
/// state is owned here; runs are deterministic for a fixed config.
class MissionEngine {
 public:
  explicit MissionEngine(const MissionConfig& cfg, Recorder* rec = nullptr);
  ~MissionEngine();
  MissionEngine(const MissionEngine&) = delete;
  MissionEngine& operator=(const MissionEngine&) = delete;

  RunSummary run();

  /// One Algorithm-2 iteration: real-time stepping until t' exceeds the
  /// iteration's T_u, then maximal stepping, ending when the first agent
  /// clears its subregion. Returns the finisher id, or -1 when the run
  /// ended (completion, step cap, or stall in the final phase).
  int run_algo2_iteration();

  /// End-of-iteration handoff: snapshot the workload, teleport the
  /// finisher to the heaviest neighbor subregion's peak cell, re-partition,
  /// advance k and reset t'.
  void handoff(int finisher);

  double t() const;
  double t_prime() const;
  int k() const;
  double total_M() const;
  const RegionGrid& region() const;
  const WorkloadField& workload() const;
  const std::vector<AgentState>& agents() const;
  const Partition& partition() const;
  const std::vector<Event>& events() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

RunSummary run_algo1(const MissionConfig& cfg, Recorder* rec = nullptr);
RunSummary run_algo3(const MissionConfig& cfg, Recorder* rec = nullptr);
RunSummary run_centralized(const MissionConfig& cfg, Recorder* rec = nullptr);
RunSummary run_mission(const MissionConfig& cfg, Recorder* rec = nullptr);

}  // namespace heatcover
