#pragma once

#include <cstdint>
#include <set>
#include <vector>

namespace platoon {

enum class DuplexMode { HD, FD };

// Right: away from the leader (node 0), Left: toward it.
enum class Direction { Right, Left };

struct DirectionalLink {
  int id = 0;  // 1..L
  int tx = 0;
  int rx = 0;
  Direction dir = Direction::Right;
};

// Connects nodes id-1 and id; members are directional links id and id+Nr+1.
struct BidirectionalLink {
  int id = 0;  // 1..Nr+1
  int right_link = 0;
  int left_link = 0;
};

struct Flow {
  int id = 0;  // 1..F
  int source = 0;
  int destination = 0;
  Direction dir = Direction::Right;
  // The routing set is the contiguous link-id range [first_link, last_link].
  int first_link = 0;
  int last_link = 0;
  int hops = 0;
  double gamma = 1.0;  // backlog exponent, in (0, 1]

  bool allows(int link_id) const { return link_id >= first_link && link_id <= last_link; }
};

// Line network of a single platoon: nodes 0 (leader) .. N-1 (tail), one
// directional link pair between neighbours, and one flow per direction per
// (leader, member/tail) pair. Immutable after construction.
class Topology {
 public:
  Topology(int n_vehicles, const std::set<int>& fd_positions,
           const std::vector<double>& gamma_by_hops = {});

  int n_vehicles() const { return n_; }
  int n_members() const { return n_ - 2; }  // interior nodes between leader and tail
  int num_links() const { return static_cast<int>(links_.size()); }
  int num_flows() const { return static_cast<int>(flows_.size()); }
  int num_bidi() const { return static_cast<int>(bidi_.size()); }

  DuplexMode mode(int node) const { return modes_.at(static_cast<size_t>(node)); }
  bool is_fd(int node) const { return mode(node) == DuplexMode::FD; }

  const DirectionalLink& link(int id) const { return links_.at(static_cast<size_t>(id - 1)); }
  const BidirectionalLink& bidi(int id) const { return bidi_.at(static_cast<size_t>(id - 1)); }
  const Flow& flow(int id) const { return flows_.at(static_cast<size_t>(id - 1)); }
  const std::vector<Flow>& flows() const { return flows_; }

  bool is_right_link(int link_id) const { return link_id <= num_links() / 2; }
  // The opposite-direction link between the same node pair.
  int mirror(int link_id) const;
  int bidi_of(int link_id) const;

 private:
  int n_ = 0;
  std::vector<DuplexMode> modes_;
  std::vector<DirectionalLink> links_;
  std::vector<BidirectionalLink> bidi_;
  std::vector<Flow> flows_;
};

Topology build_topology(int n_vehicles, const std::set<int>& fd_positions,
                        const std::vector<double>& gamma_by_hops = {});

// Default backlog exponent for a flow: 0.8 for one hop, 1.0 for the longest
// path, 0.9 in between.
std::vector<double> default_gamma_by_hops(int n_vehicles);

// Number of flows whose routing set contains the link.
int congestion(const Topology& topo, int link_id);

// One-hop interference feasibility of a set of directional links: every node
// transmits at most once and receives at most once, and an HD node cannot
// appear in more than one active link at all.
bool is_feasible(const Topology& topo, const std::vector<int>& links);

// Every feasible activation set, ordered by an include-first depth-first walk
// over ascending link ids (sets containing lower ids come first).
std::vector<std::vector<int>> enumerate_feasible_sets(const Topology& topo);

// Only the maximal feasible sets: no further link can be activated.
std::vector<std::vector<int>> conflict_free_sets(const Topology& topo);

}  // namespace platoon
