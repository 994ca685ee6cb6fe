#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heatcover/io.hpp"
#include "heatcover/mission.hpp"
#include "heatcover/scenario.hpp"

namespace {

using namespace heatcover;

Recorder make_recorder(const MissionConfig& cfg) {
  Recorder rec;
  rec.want_partition = cfg.output.partition_raster;
  rec.want_fields = cfg.output.field_snapshots;
  return rec;
}

void print_summary_line(const RunSummary& s) {
  std::printf("%-11s T=%s T*=%s dT=%s%s\n", algorithm_name(s.algorithm), format_num(s.T).c_str(),
              format_num(s.T_star).c_str(), format_num(s.delta_T).c_str(),
              s.completed ? "" : ("  [incomplete: " + s.abort_reason + "]").c_str());
}

RunSummary run_one(const MissionConfig& cfg, Algorithm algo, const std::string& out_dir) {
  MissionConfig c = cfg;
  c.algorithm = algo;
  Recorder rec = make_recorder(c);
  MissionEngine engine(c, &rec);
  const RunSummary sum = engine.run();
  write_run_artifacts(out_dir, c.output, sum, rec, c.agent_count());
  print_summary_line(sum);
  return sum;
}

int cmd_run(const std::string& config_path, const std::string& algo, const std::string& out_override) {
  MissionConfig cfg = parse_scenario(config_path);
  if (!out_override.empty()) cfg.output.directory = out_override;

  std::vector<Algorithm> selected;
  if (algo.empty())
    selected.push_back(cfg.algorithm);
  else if (algo == "1")
    selected.push_back(Algorithm::Algo1);
  else if (algo == "3")
    selected.push_back(Algorithm::Algo3);
  else if (algo == "central")
    selected.push_back(Algorithm::Centralized);
  else if (algo == "all")
    selected = {Algorithm::Centralized, Algorithm::Algo1, Algorithm::Algo3};
  else
    throw std::invalid_argument("--algo must be one of 1, 3, central, all");

  bool all_completed = true;
  for (Algorithm a : selected) {
    const std::string dir = selected.size() == 1
                                ? cfg.output.directory
                                : cfg.output.directory + "/" + algorithm_name(a);
    const RunSummary sum = run_one(cfg, a, dir);
    all_completed = all_completed && sum.completed;
  }
  return all_completed ? 0 : 2;
}

int cmd_compare(const std::string& config_path, const std::string& out_override) {
  MissionConfig cfg = parse_scenario(config_path);
  if (!out_override.empty()) cfg.output.directory = out_override;

  std::vector<RunSummary> runs;
  for (Algorithm a : {Algorithm::Centralized, Algorithm::Algo1, Algorithm::Algo3})
    runs.push_back(run_one(cfg, a, cfg.output.directory + "/" + algorithm_name(a)));

  write_file(cfg.output.directory + "/comparison.csv", comparison_csv(runs));
  std::printf("wrote %s/comparison.csv\n", cfg.output.directory.c_str());
  bool all_completed = true;
  for (const RunSummary& s : runs) all_completed = all_completed && s.completed;
  return all_completed ? 0 : 2;
}

int cmd_validate(const std::string& config_path) {
  const MissionConfig cfg = parse_scenario(config_path);
  std::printf("OK: %d agents, %s, dt=%s, k_max=%d\n", cfg.agent_count(),
              algorithm_name(cfg.algorithm), format_num(cfg.dt).c_str(), cfg.k_max);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed multi-agent coverage control simulator"};
  app.require_subcommand(1);

  std::string config_path, algo, out_dir;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("--config", config_path, "Scenario file")->required();
  run->add_option("--algo", algo, "Algorithm override: 1, 3, central or all");
  run->add_option("--out", out_dir, "Output directory override");

  CLI::App* compare = app.add_subcommand("compare", "Run all three algorithms and tabulate T, dT, T*");
  compare->add_option("--config", config_path, "Scenario file")->required();
  compare->add_option("--out", out_dir, "Output directory override");

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("--config", config_path, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, algo, out_dir);
    if (compare->parsed()) return cmd_compare(config_path, out_dir);
    if (validate->parsed()) return cmd_validate(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
