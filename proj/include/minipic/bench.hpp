#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "minipic/config.hpp"
#include "minipic/diagnostics.hpp"
#include "minipic/scheduler.hpp"
#include "minipic/trace.hpp"

namespace minipic {

enum class Scale { Desk, Full };

Scale parse_scale(std::string_view text);

/// Named presets: "uniform_plasma_2d" and "slab_expansion_2d".
/// Throws ConfigError for unknown names.
SimConfig builtin_benchmark(std::string_view name, Scale scale = Scale::Desk);

/// Reads an INI file. Keys override `base` (or the preset named by
/// [run] benchmark when present). Throws ConfigError on malformed input.
SimConfig load_config_file(const std::filesystem::path& path, const SimConfig& base = {});
SimConfig parse_config_text(const std::string& text, const SimConfig& base = {});

/// Chrome trace-event JSON ({"traceEvents": [...]}, timestamps in microseconds).
void write_trace(const std::vector<TraceEvent>& events, const std::filesystem::path& path);
std::string trace_json(const std::vector<TraceEvent>& events);

struct TimingRow {
  ExecutionMode mode = ExecutionMode::TasksOn;
  int n_collections = 1;
  int workers = 1;
  int bin_x_size = 1;
  int iterations = 0;
  double t_particle_ops_s = 0, t_maxwell_s = 0, t_sync_s = 0, t_total_s = 0;
};

inline constexpr std::string_view kTimingHeader =
    "mode,n_collections,workers,bin_x_size,iterations,t_particle_ops_s,t_maxwell_s,t_sync_s,t_total_s";

TimingRow timing_row(const SimulationReport& report);
std::string format_timing_row(const TimingRow& row);
/// Appends a row, writing the header first when the file is new or empty.
void append_timing_row(const std::filesystem::path& path, const TimingRow& row);

/// CSV "species,patch_ix,patch_iy,count".
void write_density_histogram(const Domain& domain, const std::filesystem::path& path);

}  // namespace minipic
