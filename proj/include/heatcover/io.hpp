#pragma once

#include <string>
#include <vector>

#include "heatcover/mission.hpp"

namespace heatcover {

/// Deterministic float formatting shared by every writer ("%.12g").
std::string format_num(double v);

std::string trajectory_csv(const Recorder& rec);
std::string workload_curve_csv(const Recorder& rec, int agent_count);
std::string partition_raster_csv(const Recorder::RasterSnap& snap, int nx, int ny);
std::string field_raster_csv(const Recorder::FieldSnap& snap, int nx, int ny);
std::string summary_json(const RunSummary& sum);
std::string comparison_csv(const std::vector<RunSummary>& runs);

void write_file(const std::string& path, const std::string& content);

/// Write everything the output options ask for into `dir`; returns the list
/// of files written (relative to dir).
std::vector<std::string> write_run_artifacts(const std::string& dir, const OutputOptions& opt,
                                             const RunSummary& sum, const Recorder& rec,
                                             int agent_count);

}  // namespace heatcover
