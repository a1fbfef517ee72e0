#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "platoon/topology.hpp"

namespace platoon {

struct ArrivalConfig {
  double lambda = 0.04;  // packets per slot per flow
  std::vector<int64_t> sizes_bits = {40000, 72000, 104000, 136000};

  bool operator==(const ArrivalConfig&) const = default;
};

struct Packet {
  uint64_t id = 0;
  int flow = 0;
  int64_t size_bits = 0;
  int64_t arrival_slot = 0;
  int64_t remaining_bits = 0;  // still to transmit over the current hop
  int64_t delivered_slot = -1;
};

// Per-node per-flow FIFO queues with bit-granularity backlogs. A packet moves
// to the next hop (or is delivered) only once its final bit has crossed;
// partial progress stays at the head of the transmit queue. Forwarded packets
// become eligible at the next slot, after commit().
class QueueState {
 public:
  explicit QueueState(const Topology& topo);

  int64_t backlog(int node, int flow) const;  // Q_i^f, 0 off-path and at the destination
  bool flow_has_backlog(int flow) const;

  // Places a fresh arrival at the flow's source and assigns the packet id.
  void enqueue(Packet p);

  // Transmits up to budget_bits FIFO from the link's tx queue; returns bits
  // sent. Fully transmitted packets are delivered (rx == destination) or
  // staged for the rx queue. Rejects flows not routed over the link.
  int64_t serve(int link_id, int flow_id, int64_t budget_bits, int64_t slot);

  // Moves staged packets into their receive queues (end-of-slot step).
  void commit();

  int64_t arrived_bits() const { return arrived_bits_; }
  int64_t delivered_bits() const { return delivered_bits_; }
  int64_t arrived_packets() const { return arrived_packets_; }
  int64_t delivered_packets() const { return static_cast<int64_t>(delivered_.size()); }
  int64_t undelivered_packets() const { return arrived_packets_ - delivered_packets(); }

  // Recomputed by scanning the queues, not tracked incrementally.
  int64_t queued_bits() const;
  int64_t in_flight_bits() const;
  bool conservation_holds() const {
    return arrived_bits_ == delivered_bits_ + queued_bits() + in_flight_bits();
  }

  const std::vector<Packet>& delivered() const { return delivered_; }

 private:
  struct Fifo {
    std::deque<Packet> q;
    int64_t backlog = 0;
  };

  Fifo& fifo(int node, int flow) { return queues_[static_cast<size_t>(node)][static_cast<size_t>(flow - 1)]; }
  const Fifo& fifo(int node, int flow) const {
    return queues_[static_cast<size_t>(node)][static_cast<size_t>(flow - 1)];
  }

  const Topology* topo_;
  std::vector<std::vector<Fifo>> queues_;  // [node][flow-1]
  std::vector<std::pair<int, Packet>> staged_;  // (rx node, packet)
  std::vector<Packet> delivered_;
  uint64_t next_id_ = 1;
  int64_t arrived_bits_ = 0;
  int64_t delivered_bits_ = 0;
  int64_t arrived_packets_ = 0;
};

// Poisson(lambda) packets per flow this slot, sizes uniform over the size set.
std::vector<Packet> generate_arrivals(const ArrivalConfig& cfg, const Topology& topo,
                                      int64_t slot, std::mt19937_64& rng);

// End-to-end latency of a delivered packet, in slots. Throws on undelivered.
int64_t latency_slots(const Packet& p);

double slots_to_ms(int64_t slots, double slot_duration_s);
double slots_to_ms(double slots, double slot_duration_s);

}  // namespace platoon
