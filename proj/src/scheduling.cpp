#include "platoon/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace platoon {

std::vector<Unit> merge_fd_units(const Topology& topo) {
  std::vector<Unit> units;
  for (int b = 1; b <= topo.num_bidi(); ++b) {
    // Node b-1 sits between bidirectional links b-1 and b; if it is an
    // interior FD node the two links share colors.
    const int shared_node = b - 1;
    const bool fuse = !units.empty() && shared_node >= 1 && shared_node <= topo.n_members() &&
                      topo.is_fd(shared_node);
    if (fuse) {
      units.back().bidi_ids.push_back(b);
    } else {
      units.push_back(Unit{{b}});
    }
  }
  return units;
}

std::vector<int> fb_slot_counts(const Topology& topo) {
  std::vector<int> counts(static_cast<size_t>(topo.num_bidi()));
  const int top = 2 * (topo.n_members() + 1);
  for (int b = 1; b <= topo.num_bidi(); ++b) {
    counts[static_cast<size_t>(b - 1)] = top - 2 * (b - 1);
  }
  return counts;
}

int fb_frame_length(const Topology& topo) { return min_frame_length(fb_slot_counts(topo)); }

std::vector<bool> bidi_conflicts(const Topology& topo) {
  // Bidirectional links b and b+1 meet at node b; an FD node there lets them
  // share slots.
  std::vector<bool> conflicts;
  for (int b = 1; b < topo.num_bidi(); ++b) conflicts.push_back(!topo.is_fd(b));
  return conflicts;
}

int min_frame_length(const std::vector<int>& demands, const std::vector<bool>& conflicts) {
  int worst = 0;
  for (size_t i = 0; i < demands.size(); ++i) {
    worst = std::max(worst, demands[i]);
    if (i + 1 < demands.size() && conflicts.at(i)) {
      worst = std::max(worst, demands[i] + demands[i + 1]);
    }
  }
  return worst;
}

int min_frame_length(const std::vector<int>& demands) {
  if (demands.empty()) return 0;
  return min_frame_length(demands, std::vector<bool>(demands.size() - 1, true));
}

namespace {

// Parity-interleaved assignment for a run of mutually conflicting positions:
// even offsets own the even slots, odd offsets the odd slots, so neighbours
// collide only when a demand outgrows its slot class and overflows into the
// top of the other class. A neighbour of an overflowing position reserves
// that top region, which pairwise feasibility always leaves room for.
// Demands that fit spread evenly, keeping the gaps between slots short.
void color_run(const std::vector<int>& demands, size_t begin, size_t end, int frame_length,
               std::vector<std::vector<int>>& out) {
  if (end - begin == 1) {
    // isolated position: spread over the whole frame
    const int d = demands[begin];
    for (int j = 0; j < d; ++j) out[begin].push_back(j * frame_length / d);
    return;
  }
  std::vector<int> even_class, odd_class;
  for (int s = 0; s < frame_length; s += 2) even_class.push_back(s);
  for (int s = 1; s < frame_length; s += 2) odd_class.push_back(s);
  for (size_t i = begin; i < end; ++i) {
    const int offset = static_cast<int>(i - begin);
    const int d = demands[i];
    const auto& own = offset % 2 == 0 ? even_class : odd_class;
    const auto& other = offset % 2 == 0 ? odd_class : even_class;
    const int own_k = static_cast<int>(own.size());
    const int other_k = static_cast<int>(other.size());
    int reserved = 0;  // top of our class claimed by overflowing neighbours
    if (i > begin) reserved = std::max(reserved, demands[i - 1] - other_k);
    if (i + 1 < end) reserved = std::max(reserved, demands[i + 1] - other_k);
    auto& slots = out[i];
    if (d <= own_k - reserved) {
      const int usable = own_k - reserved;
      for (int j = 0; j < d; ++j) slots.push_back(own[static_cast<size_t>(j * usable / d)]);
    } else {
      // dense position: the whole class plus the top of the other class; the
      // neighbours then fit below by feasibility
      slots = own;
      for (int j = 0; j < d - own_k; ++j) {
        slots.push_back(other[static_cast<size_t>(other_k - 1 - j)]);
      }
      std::sort(slots.begin(), slots.end());
    }
  }
}

}  // namespace

std::vector<std::vector<int>> color_demands(const std::vector<int>& demands,
                                            const std::vector<bool>& conflicts, int frame_length) {
  if (min_frame_length(demands, conflicts) > frame_length) {
    throw std::invalid_argument("color_demands: demands exceed the frame length");
  }
  for (int d : demands) {
    if (d < 0) throw std::invalid_argument("color_demands: negative demand");
  }
  std::vector<std::vector<int>> out(demands.size());
  size_t begin = 0;
  while (begin < demands.size()) {
    size_t end = begin + 1;  // run of positions glued by conflicts
    while (end < demands.size() && conflicts.at(end - 1)) ++end;
    color_run(demands, begin, end, frame_length, out);
    begin = end;
  }
  return out;
}

std::vector<std::vector<int>> color_demands(const std::vector<int>& demands, int frame_length) {
  if (demands.empty()) return {};
  return color_demands(demands, std::vector<bool>(demands.size() - 1, true), frame_length);
}

std::vector<int> adjust_demands(std::vector<int> demands, const std::vector<bool>& conflicts,
                                int frame_length) {
  if (demands.empty()) return demands;
  if (frame_length < 1) throw std::invalid_argument("adjust_demands: frame length must be >= 1");
  while (min_frame_length(demands, conflicts) > frame_length) {
    size_t arg = 0;
    for (size_t i = 1; i < demands.size(); ++i) {
      if (demands[i] > demands[arg]) arg = i;
    }
    --demands[arg];
  }
  size_t i = 0;
  while (min_frame_length(demands, conflicts) < frame_length) {
    ++demands[i];
    if (min_frame_length(demands, conflicts) > frame_length) --demands[i];
    i = (i + 1) % demands.size();
  }
  return demands;
}

std::vector<int> adjust_demands(std::vector<int> demands, int frame_length) {
  if (demands.empty()) return demands;
  const std::vector<bool> conflicts(demands.size() - 1, true);
  return adjust_demands(std::move(demands), conflicts, frame_length);
}

DifferentialBacklog differential_backlogs(const QueueState& queues, const Topology& topo) {
  const int n_links = topo.num_links();
  const int n_flows = topo.num_flows();
  DifferentialBacklog d;
  d.per_flow.assign(static_cast<size_t>(n_links),
                    std::vector<double>(static_cast<size_t>(n_flows), 0.0));
  d.link_w.assign(static_cast<size_t>(n_links), 0.0);
  d.link_flow.assign(static_cast<size_t>(n_links), 0);
  for (const Flow& f : topo.flows()) {
    for (int l = f.first_link; l <= f.last_link; ++l) {
      const DirectionalLink& link = topo.link(l);
      const double up = static_cast<double>(queues.backlog(link.tx, f.id));
      const double down =
          link.rx == f.destination ? 0.0 : static_cast<double>(queues.backlog(link.rx, f.id));
      double w = std::pow(up, f.gamma) - std::pow(down, f.gamma);
      if (w < 0.0) w = 0.0;
      d.per_flow[static_cast<size_t>(l - 1)][static_cast<size_t>(f.id - 1)] = w;
      if (w > d.link_w[static_cast<size_t>(l - 1)]) {
        d.link_w[static_cast<size_t>(l - 1)] = w;
        d.link_flow[static_cast<size_t>(l - 1)] = f.id;
      }
    }
  }
  return d;
}

std::vector<int> qb_link_demands(const QueueState& queues, const CapacityMap& caps,
                                 const Topology& topo) {
  const DifferentialBacklog d = differential_backlogs(queues, topo);
  std::vector<int> directional(static_cast<size_t>(topo.num_links()), 0);
  for (const Flow& f : topo.flows()) {
    if (!queues.flow_has_backlog(f.id)) continue;
    int best_link = f.first_link;
    double best_ratio = -1.0;
    for (int l = f.first_link; l <= f.last_link; ++l) {
      const double w = d.per_flow[static_cast<size_t>(l - 1)][static_cast<size_t>(f.id - 1)];
      const int64_t mu = caps.clear[static_cast<size_t>(l - 1)];
      double ratio = 0.0;
      if (w > 0.0) {
        ratio = mu > 0 ? w / static_cast<double>(mu) : std::numeric_limits<double>::infinity();
      }
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_link = l;
      }
    }
    ++directional[static_cast<size_t>(best_link - 1)];
  }
  std::vector<int> bidi(static_cast<size_t>(topo.num_bidi()), 0);
  for (int b = 1; b <= topo.num_bidi(); ++b) {
    bidi[static_cast<size_t>(b - 1)] = directional[static_cast<size_t>(b - 1)] +
                                       directional[static_cast<size_t>(topo.mirror(b) - 1)];
  }
  return bidi;
}

SlotDecision select_unit_flows(const Topology& topo, const std::vector<ActiveUnit>& active,
                               const DifferentialBacklog& backlogs) {
  SlotDecision out;
  for (const ActiveUnit& au : active) {
    if (au.members.size() == 1) {
      const BidirectionalLink& b = topo.bidi(au.members[0]);
      const double wr = backlogs.link_w[static_cast<size_t>(b.right_link - 1)];
      const double wl = backlogs.link_w[static_cast<size_t>(b.left_link - 1)];
      if (wr <= 0.0 && wl <= 0.0) continue;  // nothing to send, the unit idles
      const int link = wr >= wl ? b.right_link : b.left_link;
      out.activations.push_back({link, backlogs.link_flow[static_cast<size_t>(link - 1)]});
    } else {
      // Several members of an FD unit share the slot: compare summed per-link
      // maxima per direction, then fire every active member link of the
      // winning direction that has pressure.
      double right_sum = 0.0, left_sum = 0.0;
      for (int bid : au.members) {
        const BidirectionalLink& b = topo.bidi(bid);
        right_sum += backlogs.link_w[static_cast<size_t>(b.right_link - 1)];
        left_sum += backlogs.link_w[static_cast<size_t>(b.left_link - 1)];
      }
      if (right_sum <= 0.0 && left_sum <= 0.0) continue;
      const bool right = right_sum >= left_sum;
      for (int bid : au.members) {
        const BidirectionalLink& b = topo.bidi(bid);
        const int link = right ? b.right_link : b.left_link;
        if (backlogs.link_w[static_cast<size_t>(link - 1)] > 0.0) {
          out.activations.push_back({link, backlogs.link_flow[static_cast<size_t>(link - 1)]});
        }
      }
    }
  }
  std::sort(out.activations.begin(), out.activations.end(),
            [](const Activation& a, const Activation& b) { return a.link < b.link; });
  return out;
}

SlotDecision bp_decide(const QueueState& queues, const CapacityMap& caps, const Topology& topo,
                       const std::vector<std::vector<int>>& feasible_sets) {
  const DifferentialBacklog d = differential_backlogs(queues, topo);
  double best_obj = 0.0;
  const std::vector<int>* best_set = nullptr;
  for (const auto& set : feasible_sets) {
    double obj = 0.0;
    for (int l : set) {
      const double w = d.link_w[static_cast<size_t>(l - 1)];
      if (w <= 0.0) continue;
      const int flow = d.link_flow[static_cast<size_t>(l - 1)];
      const int64_t cap = caps.effective(l, rx_transmits(topo, l, set));
      const int64_t mu = std::min(queues.backlog(topo.link(l).tx, flow), cap);
      obj += w * static_cast<double>(mu);
    }
    if (obj > best_obj) {
      best_obj = obj;
      best_set = &set;
    }
  }
  SlotDecision out;
  out.objective = best_obj;
  if (best_set != nullptr) {
    for (int l : *best_set) {
      const double w = d.link_w[static_cast<size_t>(l - 1)];
      if (w <= 0.0) continue;
      const int flow = d.link_flow[static_cast<size_t>(l - 1)];
      const int64_t cap = caps.effective(l, rx_transmits(topo, l, *best_set));
      const int64_t mu = std::min(queues.backlog(topo.link(l).tx, flow), cap);
      if (w * static_cast<double>(mu) > 0.0) out.activations.push_back({l, flow});
    }
  }
  return out;
}

std::vector<std::string> validate_decision(const Topology& topo, const SlotDecision& decision) {
  std::vector<std::string> errors;
  std::vector<int> tx_count(static_cast<size_t>(topo.n_vehicles()), 0);
  std::vector<int> rx_count(static_cast<size_t>(topo.n_vehicles()), 0);
  std::vector<int> link_count(static_cast<size_t>(topo.num_links()), 0);
  for (const Activation& a : decision.activations) {
    if (a.link < 1 || a.link > topo.num_links()) {
      errors.push_back("link id " + std::to_string(a.link) + " out of range");
      continue;
    }
    if (a.flow < 1 || a.flow > topo.num_flows()) {
      errors.push_back("flow id " + std::to_string(a.flow) + " out of range");
      continue;
    }
    if (!topo.flow(a.flow).allows(a.link)) {
      errors.push_back("flow " + std::to_string(a.flow) + " not routed over link " +
                       std::to_string(a.link));
    }
    if (++link_count[static_cast<size_t>(a.link - 1)] > 1) {
      errors.push_back("link " + std::to_string(a.link) + " activated for more than one flow");
    }
    const DirectionalLink& l = topo.link(a.link);
    ++tx_count[static_cast<size_t>(l.tx)];
    ++rx_count[static_cast<size_t>(l.rx)];
  }
  for (int i = 0; i < topo.n_vehicles(); ++i) {
    const int t = tx_count[static_cast<size_t>(i)];
    const int r = rx_count[static_cast<size_t>(i)];
    if (t > 1) errors.push_back("node " + std::to_string(i) + " transmits on multiple links");
    if (r > 1) errors.push_back("node " + std::to_string(i) + " receives on multiple links");
    if (!topo.is_fd(i) && t + r > 1) {
      errors.push_back("HD node " + std::to_string(i) + " both transmits and receives");
    }
  }
  return errors;
}

namespace {

FrameSchedule assemble_frame(const Topology& topo, std::vector<int> bidi_demands,
                             int frame_length) {
  FrameSchedule frame;
  frame.frame_length = frame_length;
  frame.units = merge_fd_units(topo);
  frame.bidi_demands = std::move(bidi_demands);
  frame.bidi_slots = color_demands(frame.bidi_demands, bidi_conflicts(topo), frame_length);
  frame.active.assign(static_cast<size_t>(frame_length), {});
  std::vector<std::vector<bool>> on(frame.bidi_slots.size(),
                                    std::vector<bool>(static_cast<size_t>(frame_length), false));
  for (size_t b = 0; b < frame.bidi_slots.size(); ++b) {
    for (int s : frame.bidi_slots[b]) on[b][static_cast<size_t>(s)] = true;
  }
  for (int s = 0; s < frame_length; ++s) {
    for (size_t u = 0; u < frame.units.size(); ++u) {
      ActiveUnit au;
      au.unit = static_cast<int>(u);
      for (int bid : frame.units[u].bidi_ids) {
        if (on[static_cast<size_t>(bid - 1)][static_cast<size_t>(s)]) au.members.push_back(bid);
      }
      if (!au.members.empty()) frame.active[static_cast<size_t>(s)].push_back(std::move(au));
    }
  }
  return frame;
}

}  // namespace

FrameSchedule build_fb_frame(const Topology& topo, int frame_length) {
  return assemble_frame(topo, fb_slot_counts(topo), frame_length);
}

FrameSchedule build_qb_frame(const Topology& topo, const QueueState& queues,
                             const CapacityMap& caps, int frame_length) {
  auto demands =
      adjust_demands(qb_link_demands(queues, caps, topo), bidi_conflicts(topo), frame_length);
  return assemble_frame(topo, std::move(demands), frame_length);
}

namespace {

class BpScheduler final : public Scheduler {
 public:
  explicit BpScheduler(const Topology& topo)
      : topo_(topo), feasible_sets_(enumerate_feasible_sets(topo)) {}

  SlotDecision decide(int64_t, const QueueState& queues, const CapacityMap& caps) override {
    ++recomputes_;
    return bp_decide(queues, caps, topo_, feasible_sets_);
  }

 private:
  const Topology& topo_;
  std::vector<std::vector<int>> feasible_sets_;
};

class TdmaScheduler final : public Scheduler {
 public:
  TdmaScheduler(const Topology& topo, int frame_length, bool queue_based)
      : topo_(topo), frame_length_(frame_length), queue_based_(queue_based) {}

  SlotDecision decide(int64_t slot, const QueueState& queues, const CapacityMap& caps) override {
    const int offset = static_cast<int>(slot % frame_length_);
    if (offset == 0 || frame_.frame_length == 0) {
      frame_ = queue_based_ ? build_qb_frame(topo_, queues, caps, frame_length_)
                            : build_fb_frame(topo_, frame_length_);
      ++recomputes_;
    }
    const DifferentialBacklog d = differential_backlogs(queues, topo_);
    return select_unit_flows(topo_, frame_.active[static_cast<size_t>(offset)], d);
  }

 private:
  const Topology& topo_;
  int frame_length_;
  bool queue_based_;
  FrameSchedule frame_;
};

}  // namespace

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, const Topology& topo,
                                          int frame_length) {
  switch (kind) {
    case SchedulerKind::BackPressure:
      return std::make_unique<BpScheduler>(topo);
    case SchedulerKind::FlowBased:
      return std::make_unique<TdmaScheduler>(topo, frame_length, false);
    case SchedulerKind::QueueBased:
      return std::make_unique<TdmaScheduler>(topo, frame_length, true);
  }
  throw std::logic_error("make_scheduler: unknown kind");
}

const char* scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::FlowBased:
      return "fb";
    case SchedulerKind::BackPressure:
      return "bp";
    case SchedulerKind::QueueBased:
      return "qb";
  }
  return "?";
}

}  // namespace platoon
