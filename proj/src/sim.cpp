#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>

namespace platoon {

namespace {

std::mt19937_64 seeded_rng(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{seed, stream};
  return std::mt19937_64(seq);
}

}  // namespace

Metrics run(const SimConfig& cfg) {
  const auto errors = validate_config(cfg);
  if (!errors.empty()) throw ConfigError("invalid config: " + errors.front());

  const Topology topo(cfg.n_vehicles, cfg.fd_positions, cfg.gamma_by_hops);
  const ChannelModel channel(cfg.channel, cfg.slot_duration_s);
  const int frame_length = resolved_frame_length(cfg);
  const int64_t coherence_slots =
      cfg.channel.coherence == Coherence::PerFrame ? frame_length : 1;
  auto scheduler = make_scheduler(cfg.scheduler, topo, frame_length);

  QueueState queues(topo);
  auto arrival_rng = seeded_rng(cfg.seed, 0x61727276);  // arrivals stream
  auto channel_rng = seeded_rng(cfg.seed, 0x6368616e);  // shadowing stream

  Metrics m;
  m.total_slots = cfg.total_slots;
  m.slot_duration_s = cfg.slot_duration_s;
  m.frame_length = frame_length;
  m.per_flow.assign(static_cast<size_t>(topo.num_flows()), {});
  m.link_active_slots.assign(static_cast<size_t>(topo.num_links()), 0);
  m.backlog_trace.reserve(static_cast<size_t>(cfg.total_slots));

  CapacityMap caps;
  size_t delivered_seen = 0;
  std::vector<int> active_links;

  for (int64_t slot = 0; slot < cfg.total_slots; ++slot) {
    for (Packet& p : generate_arrivals(cfg.arrivals, topo, slot, arrival_rng)) {
      ++m.arrived_packets;
      m.arrived_bits += p.size_bits;
      ++m.per_flow[static_cast<size_t>(p.flow - 1)].arrived;
      queues.enqueue(std::move(p));
    }

    if (slot % coherence_slots == 0) caps = channel.draw(topo, channel_rng);

    const SlotDecision decision = scheduler->decide(slot, queues, caps);
    if (!validate_decision(topo, decision).empty()) ++m.violation_slots;

    active_links.clear();
    for (const Activation& a : decision.activations) active_links.push_back(a.link);
    for (const Activation& a : decision.activations) {
      const int64_t cap = caps.effective(a.link, rx_transmits(topo, a.link, active_links));
      const int64_t sent = queues.serve(a.link, a.flow, cap, slot);
      if (sent > 0) ++m.link_active_slots[static_cast<size_t>(a.link - 1)];
    }
    queues.commit();

    if (!queues.conservation_holds()) m.conservation_ok = false;
    m.backlog_trace.push_back(queues.arrived_bits() - queues.delivered_bits());

    const auto& delivered = queues.delivered();
    for (; delivered_seen < delivered.size(); ++delivered_seen) {
      const Packet& p = delivered[delivered_seen];
      FlowMetrics& fm = m.per_flow[static_cast<size_t>(p.flow - 1)];
      ++fm.delivered;
      fm.delivered_bits += p.size_bits;
      if (p.arrival_slot < cfg.warmup_slots) continue;  // excluded from latency stats
      const int64_t lat = latency_slots(p);
      fm.latency_samples.push_back(lat);
      fm.latency_sum_slots += lat;
      fm.max_latency_slots = std::max(fm.max_latency_slots, lat);
    }
  }

  m.delivered_packets = queues.delivered_packets();
  m.delivered_bits = queues.delivered_bits();
  m.undelivered_packets = queues.undelivered_packets();
  m.recomputes = scheduler->recomputes();
  return m;
}

Report summarize(const Metrics& m, double slot_duration_s) {
  Report r;
  r.delivered = m.delivered_packets;
  r.undelivered = m.undelivered_packets;
  r.recomputes = m.recomputes;
  r.violation_slots = m.violation_slots;
  r.conservation_ok = m.conservation_ok;

  const double duration_s = static_cast<double>(m.total_slots) * slot_duration_s;
  int64_t total_samples = 0;
  int64_t total_latency = 0;
  int64_t max_latency = 0;
  for (size_t i = 0; i < m.per_flow.size(); ++i) {
    const FlowMetrics& fm = m.per_flow[i];
    FlowReport fr;
    fr.flow = static_cast<int>(i) + 1;
    fr.delivered = fm.delivered;
    fr.no_samples = fm.latency_samples.empty();
    if (!fr.no_samples) {
      fr.mean_latency_ms = slots_to_ms(static_cast<double>(fm.latency_sum_slots) /
                                           static_cast<double>(fm.latency_samples.size()),
                                       slot_duration_s);
      fr.max_latency_ms = slots_to_ms(fm.max_latency_slots, slot_duration_s);
    }
    fr.throughput_bps = duration_s > 0.0 ? static_cast<double>(fm.delivered_bits) / duration_s : 0.0;
    total_samples += static_cast<int64_t>(fm.latency_samples.size());
    total_latency += fm.latency_sum_slots;
    max_latency = std::max(max_latency, fm.max_latency_slots);
    r.flows.push_back(fr);
  }
  r.no_samples = total_samples == 0;
  if (!r.no_samples) {
    r.mean_latency_ms = slots_to_ms(
        static_cast<double>(total_latency) / static_cast<double>(total_samples), slot_duration_s);
    r.max_latency_ms = slots_to_ms(max_latency, slot_duration_s);
  }

  // Least-squares slope of the bits-in-system trace; a clearly positive slope
  // relative to the offered load marks an unstable run.
  const size_t n = m.backlog_trace.size();
  if (n >= 2) {
    const double mean_x = static_cast<double>(n - 1) / 2.0;
    double mean_y = 0.0;
    for (int64_t v : m.backlog_trace) mean_y += static_cast<double>(v);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double dx = static_cast<double>(i) - mean_x;
      sxy += dx * (static_cast<double>(m.backlog_trace[i]) - mean_y);
      sxx += dx * dx;
    }
    r.backlog_slope_bits_per_slot = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  const double offered_bits_per_slot =
      m.total_slots > 0 ? static_cast<double>(m.arrived_bits) / static_cast<double>(m.total_slots)
                        : 0.0;
  r.stable = r.backlog_slope_bits_per_slot <= 0.01 * offered_bits_per_slot + 1e-9;
  return r;
}

}  // namespace platoon
