#include "heatcover/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace heatcover {

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string trajectory_csv(const Recorder& rec) {
  std::string out = "t,k,agent,x,y,mode,u_norm\n";
  for (const TrajectoryRow& r : rec.trajectory) {
    out += format_num(r.t);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += std::to_string(r.agent + 1);
    out += ',';
    out += format_num(r.x);
    out += ',';
    out += format_num(r.y);
    out += ',';
    out += (r.phase == 'M' ? "maximal" : "realtime");
    out += ',';
    out += format_num(r.u_norm);
    out += '\n';
  }
  return out;
}

std::string workload_curve_csv(const Recorder& rec, int agent_count) {
  const bool per_agent = !rec.curve.empty() && !rec.curve.front().M_per_agent.empty();
  std::string out = "t,M_total";
  if (per_agent)
    for (int i = 1; i <= agent_count; ++i) out += ",M_" + std::to_string(i);
  out += '\n';
  for (const CurveRow& r : rec.curve) {
    out += format_num(r.t);
    out += ',';
    out += format_num(r.M);
    if (per_agent)
      for (double m : r.M_per_agent) {
        out += ',';
        out += format_num(m);
      }
    out += '\n';
  }
  return out;
}

std::string partition_raster_csv(const Recorder::RasterSnap& snap, int nx, int ny) {
  std::string out;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i) out += ',';
      out += std::to_string(snap.labels[static_cast<size_t>(j) * nx + i]);
    }
    out += '\n';
  }
  return out;
}

std::string field_raster_csv(const Recorder::FieldSnap& snap, int nx, int ny) {
  std::string out;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i) out += ',';
      const size_t c = static_cast<size_t>(j) * nx + i;
      if (snap.defined[c]) out += format_num(snap.values[c]);
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const RunSummary& sum) {
  nlohmann::ordered_json j;
  j["algorithm"] = algorithm_name(sum.algorithm);
  j["completed"] = sum.completed;
  if (!sum.completed) j["abort_reason"] = sum.abort_reason;
  j["T"] = sum.T;
  j["T_star"] = sum.T_star;
  j["delta_T"] = sum.delta_T;
  j["M0"] = sum.M0;
  j["M_final"] = sum.M_final;
  j["coverage_speed"] = sum.v;
  j["steps"] = sum.steps;
  j["iterations_run"] = sum.iterations_run;
  j["solver"] = {{"calls", sum.solver.calls},
                 {"iterations", sum.solver.iterations},
                 {"max_iterations", sum.solver.max_iterations}};
  nlohmann::ordered_json its = nlohmann::ordered_json::array();
  for (const IterationRecord& r : sum.iterations) {
    its.push_back({{"k", r.k},
                   {"t_start", r.t_start},
                   {"t_end", r.t_end},
                   {"finisher", r.finisher >= 0 ? r.finisher + 1 : -1},
                   {"M_start", r.M_start},
                   {"M_end", r.M_end},
                   {"realtime_steps", r.realtime_steps},
                   {"maximal_steps", r.maximal_steps},
                   {"field_solves", r.field_solves}});
  }
  j["iterations"] = std::move(its);
  nlohmann::ordered_json evs = nlohmann::ordered_json::array();
  for (const Event& e : sum.events)
    evs.push_back({{"t", e.t}, {"k", e.k}, {"kind", e.kind}, {"detail", e.detail}});
  j["events"] = std::move(evs);
  return j.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<RunSummary>& runs) {
  std::string out = "method,T,delta_T,T_star\n";
  for (const RunSummary& s : runs) {
    out += algorithm_name(s.algorithm);
    out += ',';
    out += format_num(s.T);
    out += ',';
    out += format_num(s.delta_T);
    out += ',';
    out += format_num(s.T_star);
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> write_run_artifacts(const std::string& dir, const OutputOptions& opt,
                                             const RunSummary& sum, const Recorder& rec,
                                             int agent_count) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir + "/" + name, content);
    written.push_back(name);
  };
  if (opt.summary) emit("summary.json", summary_json(sum));
  if (opt.trajectory) emit("trajectory.csv", trajectory_csv(rec));
  if (opt.workload_curve) emit("workload_curve.csv", workload_curve_csv(rec, agent_count));
  if (opt.partition_raster)
    for (const auto& snap : rec.partitions)
      emit("partition_k" + std::to_string(snap.k) + ".csv",
           partition_raster_csv(snap, rec.nx, rec.ny));
  if (opt.field_snapshots)
    for (const auto& snap : rec.fields)
      emit("field_k" + std::to_string(snap.k) + "_agent" + std::to_string(snap.agent + 1) + "_t" +
               format_num(snap.t) + ".csv",
           field_raster_csv(snap, rec.nx, rec.ny));
  return written;
}

}  // namespace heatcover
