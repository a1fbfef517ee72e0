#pragma once

#include <string>
#include <vector>

#include "platoon/config.hpp"
#include "platoon/sim.hpp"

namespace platoon {

struct ResultRow {
  SchedulerKind scheduler = SchedulerKind::FlowBased;
  std::set<int> fd_positions;
  double sic_db = 0.0;
  double lambda = 0.0;
  uint64_t seed = 0;
  bool ok = false;
  std::string error;

  int64_t delivered = 0;
  int64_t undelivered = 0;
  double mean_latency_ms = 0.0;
  double max_latency_ms = 0.0;
  int64_t recomputes = 0;
  int64_t violation_slots = 0;
  bool conservation_ok = true;
  double backlog_slope = 0.0;
  bool stable = true;
  std::vector<double> flow_mean_ms;  // NaN when a flow has no samples
  std::vector<double> flow_max_ms;
  std::vector<double> flow_throughput_bps;
};

SimConfig point_config(const SweepSpec& spec, const std::set<int>& fd, double sic,
                       SchedulerKind sched, double lambda, uint64_t seed);

// Runs every (fd, sic, scheduler, lambda, seed) point; rows come back in
// canonical axis order regardless of parallelism. Per-point failures are
// recorded in the row and the sweep continues.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, int parallelism);

std::vector<std::string> validate_sweep(const SweepSpec& spec);

// Fixed column set, '.' decimal point, 6-digit fixed precision.
std::string rows_to_csv(const std::vector<ResultRow>& rows, int num_flows);
std::string rows_to_json(const std::vector<ResultRow>& rows);

}  // namespace platoon
