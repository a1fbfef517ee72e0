#include "platoon/queueing.hpp"

#include <algorithm>
#include <stdexcept>

namespace platoon {

QueueState::QueueState(const Topology& topo) : topo_(&topo) {
  queues_.assign(static_cast<size_t>(topo.n_vehicles()),
                 std::vector<Fifo>(static_cast<size_t>(topo.num_flows())));
}

int64_t QueueState::backlog(int node, int flow) const { return fifo(node, flow).backlog; }

bool QueueState::flow_has_backlog(int flow) const {
  const Flow& f = topo_->flow(flow);
  // Walk the path from the source toward (but excluding) the destination.
  for (int l = f.first_link; l <= f.last_link; ++l) {
    if (fifo(topo_->link(l).tx, flow).backlog > 0) return true;
  }
  return false;
}

void QueueState::enqueue(Packet p) {
  const Flow& f = topo_->flow(p.flow);
  p.id = next_id_++;
  p.remaining_bits = p.size_bits;
  arrived_bits_ += p.size_bits;
  ++arrived_packets_;
  Fifo& q = fifo(f.source, p.flow);
  q.backlog += p.size_bits;
  q.q.push_back(std::move(p));
}

int64_t QueueState::serve(int link_id, int flow_id, int64_t budget_bits, int64_t slot) {
  const Flow& f = topo_->flow(flow_id);
  if (!f.allows(link_id)) {
    throw std::invalid_argument("serve: flow " + std::to_string(flow_id) +
                                " is not routed over link " + std::to_string(link_id));
  }
  if (budget_bits < 0) {
    throw std::invalid_argument("serve: negative budget");
  }
  const DirectionalLink& link = topo_->link(link_id);
  Fifo& q = fifo(link.tx, flow_id);
  int64_t sent = 0;
  while (budget_bits > 0 && !q.q.empty()) {
    Packet& head = q.q.front();
    const int64_t take = std::min(head.remaining_bits, budget_bits);
    head.remaining_bits -= take;
    q.backlog -= take;
    budget_bits -= take;
    sent += take;
    if (head.remaining_bits > 0) break;  // budget exhausted mid-packet
    Packet done = std::move(head);
    q.q.pop_front();
    if (link.rx == f.destination) {
      done.delivered_slot = slot;
      delivered_bits_ += done.size_bits;
      delivered_.push_back(std::move(done));
    } else {
      done.remaining_bits = done.size_bits;  // full retransmission on the next hop
      staged_.emplace_back(link.rx, std::move(done));
    }
  }
  return sent;
}

void QueueState::commit() {
  for (auto& [node, p] : staged_) {
    Fifo& q = fifo(node, p.flow);
    q.backlog += p.size_bits;
    q.q.push_back(std::move(p));
  }
  staged_.clear();
}

int64_t QueueState::queued_bits() const {
  int64_t total = 0;
  for (const auto& per_node : queues_) {
    for (const Fifo& q : per_node) total += q.backlog;
  }
  return total;
}

int64_t QueueState::in_flight_bits() const {
  // Only head-of-line packets can have partial progress; everything behind
  // them still carries its full size.
  int64_t total = 0;
  for (const auto& per_node : queues_) {
    for (const Fifo& q : per_node) {
      if (!q.q.empty()) total += q.q.front().size_bits - q.q.front().remaining_bits;
    }
  }
  for (const auto& [node, p] : staged_) {
    (void)node;
    total += p.size_bits;
  }
  return total;
}

std::vector<Packet> generate_arrivals(const ArrivalConfig& cfg, const Topology& topo,
                                      int64_t slot, std::mt19937_64& rng) {
  std::vector<Packet> out;
  if (cfg.lambda <= 0.0) return out;
  std::poisson_distribution<int> count(cfg.lambda);
  std::uniform_int_distribution<size_t> pick(0, cfg.sizes_bits.size() - 1);
  for (const Flow& f : topo.flows()) {
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      Packet p;
      p.flow = f.id;
      p.size_bits = cfg.sizes_bits[pick(rng)];
      p.arrival_slot = slot;
      out.push_back(p);
    }
  }
  return out;
}

int64_t latency_slots(const Packet& p) {
  if (p.delivered_slot < 0) {
    throw std::invalid_argument("latency_slots: packet not delivered");
  }
  return p.delivered_slot - p.arrival_slot;
}

double slots_to_ms(int64_t slots, double slot_duration_s) {
  return static_cast<double>(slots) * slot_duration_s * 1e3;
}

double slots_to_ms(double slots, double slot_duration_s) { return slots * slot_duration_s * 1e3; }

}  // namespace platoon
