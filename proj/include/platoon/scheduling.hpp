#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "platoon/channel.hpp"
#include "platoon/queueing.hpp"
#include "platoon/topology.hpp"

namespace platoon {

enum class SchedulerKind { FlowBased, BackPressure, QueueBased };

struct Activation {
  int link = 0;
  int flow = 0;
};

struct SlotDecision {
  std::vector<Activation> activations;  // ascending link id, one flow per link
  double objective = 0.0;               // value of the W*mu objective (back-pressure)
};

// Schedulable unit for the TDMA schemes: a maximal run of bidirectional links
// chained through interior FD nodes. With no FD nodes every unit is a single
// bidirectional link.
struct Unit {
  std::vector<int> bidi_ids;  // consecutive, ascending
};

// Interior FD node i fuses bidirectional links i and i+1; chains merge
// transitively. FD at the leader or tail fuses nothing.
std::vector<Unit> merge_fd_units(const Topology& topo);

// Slots per bidirectional link per frame under flow-based TDMA: equal to the
// link-pair congestion, 2(Nr+1) - 2(lb-1).
std::vector<int> fb_slot_counts(const Topology& topo);

// Minimum frame length hosting those counts: the largest adjacent-pair sum.
int fb_frame_length(const Topology& topo);

// conflicts[b-1] tells whether bidirectional links b and b+1 must not share
// slots, i.e. whether their shared node b is half-duplex.
std::vector<bool> bidi_conflicts(const Topology& topo);

// Minimum frame length for a demand vector along the path: the largest
// single demand or conflicting adjacent-pair sum. The two-argument form
// treats every pair as conflicting (the all-HD case).
int min_frame_length(const std::vector<int>& demands);
int min_frame_length(const std::vector<int>& demands, const std::vector<bool>& conflicts);

// Assigns demands[i] distinct slots in [0, frame_length) to each position so
// that conflicting adjacent positions are disjoint. Within a run of mutually
// conflicting positions, even offsets draw from even slots and odd offsets
// from odd slots, spread evenly; an oversized demand spills into the top of
// the other class. Positions separated by an FD node color independently and
// may coincide. Throws when min_frame_length exceeds the frame.
std::vector<std::vector<int>> color_demands(const std::vector<int>& demands, int frame_length);
std::vector<std::vector<int>> color_demands(const std::vector<int>& demands,
                                            const std::vector<bool>& conflicts, int frame_length);

// Rescales a path demand vector until its minimum frame length equals
// frame_length: decrement the largest entry (lowest index on ties) while too
// large, then fill round-robin from the first position while too small.
std::vector<int> adjust_demands(std::vector<int> demands, int frame_length);
std::vector<int> adjust_demands(std::vector<int> demands, const std::vector<bool>& conflicts,
                                int frame_length);

// Exponentiated upstream-minus-downstream queue differences, per link and per
// (link, flow). The destination side counts as zero backlog.
struct DifferentialBacklog {
  std::vector<std::vector<double>> per_flow;  // [link-1][flow-1], 0 if not routed
  std::vector<double> link_w;                 // max over routed flows
  std::vector<int> link_flow;                 // argmax flow id (lowest on ties), 0 if all zero
};

DifferentialBacklog differential_backlogs(const QueueState& queues, const Topology& topo);

// Queue-based TDMA demand per bidirectional link: each backlogged flow votes
// for its argmax_l W_l^f / C_l link; a link's demand is its vote count plus
// its mirror's.
std::vector<int> qb_link_demands(const QueueState& queues, const CapacityMap& caps,
                                 const Topology& topo);

// A unit's activation in one slot: the member bidirectional links whose color
// sets contain the slot.
struct ActiveUnit {
  int unit = 0;
  std::vector<int> members;  // bidi ids, ascending
};

// Per-slot flow choice for activated TDMA units. A lone active member serves
// the direction with the larger differential backlog (right wins ties); when
// several members of an FD unit share the slot, the direction with the larger
// summed per-link maxima wins and every active member link of that direction
// fires at once.
SlotDecision select_unit_flows(const Topology& topo, const std::vector<ActiveUnit>& active,
                               const DifferentialBacklog& backlogs);

// Back-pressure: maximize sum of W_l * min{Q, C_l} over the given feasible
// activation sets, with capacities conditioned on which receivers also
// transmit inside the candidate set. First maximum in set order wins.
SlotDecision bp_decide(const QueueState& queues, const CapacityMap& caps, const Topology& topo,
                       const std::vector<std::vector<int>>& feasible_sets);

// Independent constraint checker: one flow per link, per-node transmit and
// receive multiplicities, HD exclusivity, and flow routing sets. Returns one
// message per violation.
std::vector<std::string> validate_decision(const Topology& topo, const SlotDecision& decision);

struct FrameSchedule {
  int frame_length = 0;
  std::vector<Unit> units;                   // FD groupings, for flow selection
  std::vector<int> bidi_demands;             // slots granted per bidirectional link
  std::vector<std::vector<int>> bidi_slots;  // per bidi link: ascending slots in [0, T)
  std::vector<std::vector<ActiveUnit>> active;  // per slot
};

FrameSchedule build_fb_frame(const Topology& topo, int frame_length);
FrameSchedule build_qb_frame(const Topology& topo, const QueueState& queues,
                             const CapacityMap& caps, int frame_length);

// Common per-slot interface over the three algorithms.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual SlotDecision decide(int64_t slot, const QueueState& queues, const CapacityMap& caps) = 0;
  int64_t recomputes() const { return recomputes_; }

 protected:
  int64_t recomputes_ = 0;
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const Topology& topo,
                                          int frame_length);

const char* scheduler_name(SchedulerKind kind);

}  // namespace platoon
