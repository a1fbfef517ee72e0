#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/channel.hpp"
#include "platoon/queueing.hpp"
#include "platoon/scheduling.hpp"

namespace platoon {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  int n_vehicles = 5;
  std::set<int> fd_positions;
  SchedulerKind scheduler = SchedulerKind::FlowBased;
  int64_t total_slots = 40000;
  double slot_duration_s = 125e-6;
  int frame_length = 0;  // 0: derive from fb_frame_length of the all-HD layout
  uint64_t seed = 1;
  int64_t warmup_slots = 0;  // arrivals before this slot are excluded from latency stats
  ChannelConfig channel;
  ArrivalConfig arrivals;
  std::vector<double> gamma_by_hops;  // empty: default 0.8 / 0.9 / 1.0 rule

  bool operator==(const SimConfig&) const = default;
};

struct SweepSpec {
  SimConfig base;
  // Empty axis means "just the base value".
  std::vector<std::set<int>> fd_axis;
  std::vector<double> sic_axis;
  std::vector<SchedulerKind> scheduler_axis;
  std::vector<double> lambda_axis;
  std::vector<uint64_t> seed_axis;
  int max_points = 4096;
};

struct ParsedConfig {
  SimConfig config;
  std::optional<SweepSpec> sweep;  // set when the file has a [sweep] section
};

// Flat sectioned key=value format; unknown sections/keys are rejected with
// line diagnostics. An empty file yields the full default configuration.
ParsedConfig parse_config_text(const std::string& text, const std::string& source_name);
ParsedConfig parse_config_file(const std::string& path);

// Canonical text form; parse_config_text(emit_config(c)) reproduces c exactly.
std::string emit_config(const SimConfig& cfg);

std::vector<std::string> validate_config(const SimConfig& cfg);
std::vector<std::string> config_warnings(const SimConfig& cfg);

// The frame length actually used by a run (explicit value or the flow-based
// default for the all-HD layout).
int resolved_frame_length(const SimConfig& cfg);

// Shortest double literal that parses back to exactly the same value.
std::string format_double(double v);

std::string format_fd_positions(const std::set<int>& fd);  // "none" or "1+2+3"

}  // namespace platoon
