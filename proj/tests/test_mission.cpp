#include <doctest.h>

#include <cmath>

#include "heatcover/io.hpp"
#include "heatcover/mission.hpp"
#include "oracles.hpp"

using namespace heatcover;

namespace {

MissionConfig desk_config() {
  MissionConfig cfg;
  cfg.region.outer = {0, 0, 4, 4};
  cfg.region.spacing = 0.2;
  cfg.workload = {{3.0, {2.8, 2.8}, 0.4}};
  cfg.initial_positions = {{1.0, 1.0}};
  cfg.agent_speed = 0.5;
  cfg.kernel = {6.0, 1.0, 0.5};
  cfg.dt = 0.1;
  cfg.T_u = 500.0;
  cfg.k_max = 3;
  cfg.eps_M = 1e-3;
  cfg.max_steps = 20000;
  cfg.mesh_max_edge = 0.45;
  cfg.output.sample_stride = 1;
  return cfg;
}

void check_curve_monotone(const Recorder& rec) {
  for (size_t i = 1; i < rec.curve.size(); ++i) CHECK(rec.curve[i].M <= rec.curve[i - 1].M);
}

}  // namespace

TEST_CASE("run_algo1: zero workload completes at T = 0") {
  MissionConfig cfg = desk_config();
  cfg.workload.clear();
  const RunSummary sum = run_algo1(cfg);
  CHECK(sum.completed);
  CHECK(sum.T == 0.0);
  CHECK(sum.T_star == 0.0);
}

TEST_CASE("run_algo1: one agent clears one blob, M non-increasing throughout") {
  MissionConfig cfg = desk_config();
  Recorder rec;
  const RunSummary sum = run_algo1(cfg, &rec);
  CHECK(sum.completed);
  CHECK(sum.M_final <= cfg.eps_M);
  CHECK(sum.T > 0.0);
  check_curve_monotone(rec);
  // optimal time is a lower bound up to quadrature and threshold slack
  CHECK(sum.delta_T >= -(0.05 * sum.T_star + 2.0 * cfg.dt));
  CHECK(sum.accounting_max_rel_err <= 1e-9);
}

TEST_CASE("run_algo1: max_steps exhaustion is a report, not a crash") {
  MissionConfig cfg = desk_config();
  cfg.max_steps = 5;
  const RunSummary sum = run_algo1(cfg);
  CHECK_FALSE(sum.completed);
  CHECK(sum.abort_reason.find("max_steps") != std::string::npos);
  CHECK(sum.steps == 5);
}

TEST_CASE("run_algo2_iteration: an already-clear subregion finishes immediately") {
  MissionConfig cfg = desk_config();
  cfg.region.outer = {0, 0, 6, 2};
  cfg.workload = {{4.0, {5.0, 1.0}, 0.05}};  // numerically zero on the left half
  cfg.initial_positions = {{1.0, 1.0}, {5.0, 1.2}};
  MissionEngine engine(cfg);
  const int finisher = engine.run_algo2_iteration();
  CHECK(finisher == 0);
  CHECK(engine.t() == 0.0);  // ended before any step
}

TEST_CASE("run_algo2_iteration: the lightly loaded agent finishes first") {
  MissionConfig cfg = desk_config();
  cfg.region.outer = {0, 0, 6, 2};
  cfg.workload = {{0.2, {1.0, 1.0}, 0.05}, {6.0, {5.0, 1.0}, 0.3}};
  cfg.initial_positions = {{1.0, 1.0}, {5.0, 1.0}};
  MissionEngine engine(cfg);
  const int finisher = engine.run_algo2_iteration();
  CHECK(finisher == 0);
  CHECK(engine.t() > 0.0);
  CHECK(engine.total_M() > cfg.eps_M);  // the heavy half is still loaded
}

TEST_CASE("run_algo2_iteration: maximal phase freezes fields instead of re-solving") {
  MissionConfig cfg = desk_config();
  cfg.T_u = 0.0;  // maximal update from the first step
  cfg.workload = {{3.0, {3.0, 3.0}, 0.3}};
  MissionEngine engine(cfg);
  const int finisher = engine.run_algo2_iteration();
  CHECK(finisher == 0);
  const long steps = std::lround(engine.t() / cfg.dt);
  long freezes = 0;
  for (const Event& e : engine.events())
    if (e.kind == "field_frozen") ++freezes;
  CHECK(steps > 10);
  CHECK(freezes >= 1);
  CHECK(freezes < steps / 2);
}

TEST_CASE("handoff: finisher teleports to the heaviest neighbor's peak and re-partitions") {
  MissionConfig cfg = desk_config();
  cfg.region.outer = {0, 0, 6, 2};
  cfg.workload = {{4.0, {4.6, 1.0}, 0.2}};
  cfg.initial_positions = {{1.0, 1.0}, {4.6, 0.6}};
  MissionEngine engine(cfg);
  const int finisher = engine.run_algo2_iteration();
  REQUIRE(finisher == 0);

  const int32_t old_owner_of_peak =
      engine.partition().owner[static_cast<size_t>(engine.region().cell_of({4.6, 1.0}))];
  CHECK(old_owner_of_peak == 1);

  engine.handoff(finisher);
  CHECK(engine.k() == 2);
  CHECK(engine.t_prime() == 0.0);
  // the finisher now sits on the heaviest cell of the old neighbor subregion
  const Vec2 pos = engine.agents()[0].position;
  CHECK(distance(pos, {4.6, 1.0}) <= 0.3);
  // every agent owns the cell it stands in
  for (const AgentState& a : engine.agents()) {
    const int32_t c = engine.region().cell_of(a.position);
    CHECK(engine.partition().owner[static_cast<size_t>(c)] == a.id);
  }
}

TEST_CASE("handoff: all-empty neighbors fall back to the global argmax subregion") {
  MissionConfig cfg = desk_config();
  cfg.region.outer = {0, 0, 6, 1};
  cfg.region.spacing = 0.2;
  // compact blob in the rightmost third; exact zero elsewhere in doubles
  cfg.workload = {{4.0, {5.5, 0.5}, 0.01}};
  cfg.initial_positions = {{0.5, 0.5}, {3.0, 0.5}, {5.5, 0.3}};
  MissionEngine engine(cfg);
  const int finisher = engine.run_algo2_iteration();
  REQUIRE(finisher == 0);  // leftmost agent has nothing to do
  CHECK_FALSE(engine.partition().adjacent(0, 2));
  CHECK(engine.partition().adjacent(0, 1));

  engine.handoff(finisher);
  // neighbor 1 holds exactly zero workload, so the finisher must land in
  // the far subregion that still has mass
  CHECK(distance(engine.agents()[0].position, {5.5, 0.5}) <= 0.3);
}

TEST_CASE("run_algo3 with k_max = 1 reproduces run_algo1 byte for byte") {
  MissionConfig cfg = desk_config();
  cfg.workload = {{3.0, {2.8, 2.8}, 0.4}, {2.0, {1.0, 2.5}, 0.3}};
  cfg.k_max = 1;
  Recorder rec1, rec3;
  const RunSummary s1 = run_algo1(cfg, &rec1);
  const RunSummary s3 = run_algo3(cfg, &rec3);
  CHECK(s1.completed);
  CHECK(s3.completed);
  CHECK(s1.T == s3.T);
  CHECK(trajectory_csv(rec1) == trajectory_csv(rec3));
  CHECK(workload_curve_csv(rec1, 1) == workload_curve_csv(rec3, 1));
}

TEST_CASE("run_algo3: a single agent never hands off") {
  MissionConfig cfg = desk_config();
  cfg.T_u = 5.0;  // exercise the maximal phase too
  cfg.k_max = 4;
  Recorder rec;
  const RunSummary sum = run_algo3(cfg, &rec);
  CHECK(sum.completed);
  for (const Event& e : sum.events) CHECK(e.kind != "handoff");
  check_curve_monotone(rec);
}

TEST_CASE("run_algo3: two agents, handoffs fire and M never rises across them") {
  MissionConfig cfg = desk_config();
  cfg.region.outer = {0, 0, 6, 3};
  cfg.workload = {{3.0, {5.0, 1.5}, 0.4}, {1.0, {1.0, 1.5}, 0.3}};
  cfg.initial_positions = {{1.0, 1.5}, {5.0, 1.0}};
  cfg.k_max = 4;
  Recorder rec;
  const RunSummary sum = run_algo3(cfg, &rec);
  CHECK(sum.completed);
  long handoffs = 0;
  for (const Event& e : sum.events)
    if (e.kind == "handoff") ++handoffs;
  CHECK(handoffs >= 1);
  check_curve_monotone(rec);
  CHECK(sum.accounting_max_rel_err <= 1e-9);
}

TEST_CASE("run_centralized: zero workload and pile-up determinism") {
  MissionConfig cfg = desk_config();
  SUBCASE("zero workload completes at once") {
    cfg.workload.clear();
    const RunSummary sum = run_centralized(cfg);
    CHECK(sum.completed);
    CHECK(sum.T == 0.0);
  }
  SUBCASE("identical agents at the same spot move identically") {
    cfg.initial_positions = {{1.0, 1.0}, {1.0, 1.0}};
    cfg.max_steps = 400;
    Recorder rec;
    run_centralized(cfg, &rec);
    for (size_t i = 0; i + 1 < rec.trajectory.size(); i += 2) {
      CHECK(rec.trajectory[i].x == rec.trajectory[i + 1].x);
      CHECK(rec.trajectory[i].y == rec.trajectory[i + 1].y);
    }
  }
}

TEST_CASE("identical configs give bit-identical artifacts and event logs") {
  MissionConfig cfg = desk_config();
  cfg.workload = {{3.0, {2.8, 2.8}, 0.4}, {2.0, {1.2, 2.0}, 0.2}};
  cfg.initial_positions = {{1.0, 1.0}, {3.0, 1.2}};
  cfg.k_max = 3;
  Recorder ra, rb;
  const RunSummary sa = run_algo3(cfg, &ra);
  const RunSummary sb = run_algo3(cfg, &rb);
  CHECK(summary_json(sa) == summary_json(sb));
  CHECK(trajectory_csv(ra) == trajectory_csv(rb));
  CHECK(workload_curve_csv(ra, 2) == workload_curve_csv(rb, 2));
}

TEST_CASE("comparison table shares one T* across methods") {
  MissionConfig cfg = desk_config();
  cfg.max_steps = 4000;
  std::vector<RunSummary> runs{run_centralized(cfg), run_algo1(cfg), run_algo3(cfg)};
  CHECK(runs[0].T_star == runs[1].T_star);
  CHECK(runs[1].T_star == runs[2].T_star);
  const std::string csv = comparison_csv(runs);
  CHECK(csv.find("centralized") != std::string::npos);
  CHECK(csv.find("algo1") != std::string::npos);
  CHECK(csv.find("algo3") != std::string::npos);
}
