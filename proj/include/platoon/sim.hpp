#pragma once

#include <cstdint>
#include <vector>

#include "platoon/config.hpp"

namespace platoon {

struct FlowMetrics {
  int64_t arrived = 0;
  int64_t delivered = 0;
  int64_t delivered_bits = 0;
  int64_t max_latency_slots = 0;
  int64_t latency_sum_slots = 0;
  std::vector<int64_t> latency_samples;  // slots, delivery order
};

struct Metrics {
  int64_t total_slots = 0;
  double slot_duration_s = 0.0;
  int frame_length = 0;
  std::vector<FlowMetrics> per_flow;      // [flow-1]
  int64_t arrived_packets = 0;
  int64_t arrived_bits = 0;
  int64_t delivered_packets = 0;
  int64_t delivered_bits = 0;
  int64_t undelivered_packets = 0;
  std::vector<int64_t> backlog_trace;     // bits in system after each slot
  std::vector<int64_t> link_active_slots; // [link-1]: slots with bits sent
  int64_t recomputes = 0;
  int64_t violation_slots = 0;  // slots whose activation failed the validator
  bool conservation_ok = true;
};

// Runs the slotted loop: arrivals, channel draw per coherence interval,
// scheduler decision, service at the drawn capacities, delivery bookkeeping.
// Deterministic for a given config (including seed).
Metrics run(const SimConfig& cfg);

struct FlowReport {
  int flow = 0;
  int hops = 0;
  int64_t delivered = 0;
  bool no_samples = true;
  double mean_latency_ms = 0.0;
  double max_latency_ms = 0.0;
  double throughput_bps = 0.0;
};

struct Report {
  std::vector<FlowReport> flows;
  int64_t delivered = 0;
  int64_t undelivered = 0;
  bool no_samples = true;
  double mean_latency_ms = 0.0;  // pooled over all delivered packets
  double max_latency_ms = 0.0;
  double backlog_slope_bits_per_slot = 0.0;
  bool stable = true;
  int64_t recomputes = 0;
  int64_t violation_slots = 0;
  bool conservation_ok = true;
};

Report summarize(const Metrics& m, double slot_duration_s);

}  // namespace platoon
