#include "platoon/topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace platoon {

Topology::Topology(int n_vehicles, const std::set<int>& fd_positions,
                   const std::vector<double>& gamma_by_hops) {
  if (n_vehicles < 3) {
    throw std::invalid_argument("topology: n_vehicles must be at least 3");
  }
  for (int p : fd_positions) {
    if (p < 0 || p >= n_vehicles) {
      throw std::invalid_argument("topology: FD position " + std::to_string(p) +
                                  " outside node range [0, " + std::to_string(n_vehicles - 1) +
                                  "]");
    }
  }
  n_ = n_vehicles;
  const int half = n_ - 1;  // links (and flows) per direction, Nr + 1

  modes_.assign(static_cast<size_t>(n_), DuplexMode::HD);
  for (int p : fd_positions) modes_[static_cast<size_t>(p)] = DuplexMode::FD;

  links_.reserve(static_cast<size_t>(2 * half));
  for (int l = 1; l <= half; ++l) {
    links_.push_back({l, l - 1, l, Direction::Right});
  }
  for (int l = half + 1; l <= 2 * half; ++l) {
    links_.push_back({l, l - half, l - half - 1, Direction::Left});
  }

  bidi_.reserve(static_cast<size_t>(half));
  for (int b = 1; b <= half; ++b) {
    bidi_.push_back({b, b, b + half});
  }

  std::vector<double> gammas = gamma_by_hops.empty() ? default_gamma_by_hops(n_) : gamma_by_hops;
  if (static_cast<int>(gammas.size()) != half) {
    throw std::invalid_argument("topology: gamma_by_hops must have one entry per hop count 1.." +
                                std::to_string(half));
  }
  for (double g : gammas) {
    if (!(g > 0.0 && g <= 1.0)) {
      throw std::invalid_argument("topology: gamma values must lie in (0, 1]");
    }
  }

  flows_.reserve(static_cast<size_t>(2 * half));
  for (int f = 1; f <= half; ++f) {
    Flow fl;
    fl.id = f;
    fl.source = 0;
    fl.destination = f;
    fl.dir = Direction::Right;
    fl.first_link = 1;
    fl.last_link = f;
    fl.hops = f;
    fl.gamma = gammas[static_cast<size_t>(fl.hops - 1)];
    flows_.push_back(fl);
  }
  for (int f = half + 1; f <= 2 * half; ++f) {
    Flow fl;
    fl.id = f;
    fl.source = f - half;
    fl.destination = 0;
    fl.dir = Direction::Left;
    fl.first_link = half + 1;
    fl.last_link = f;
    fl.hops = f - half;
    fl.gamma = gammas[static_cast<size_t>(fl.hops - 1)];
    flows_.push_back(fl);
  }
}

int Topology::mirror(int link_id) const {
  const int half = num_links() / 2;
  if (link_id < 1 || link_id > num_links()) {
    throw std::invalid_argument("topology: link id out of range");
  }
  return link_id <= half ? link_id + half : link_id - half;
}

int Topology::bidi_of(int link_id) const {
  const int half = num_links() / 2;
  if (link_id < 1 || link_id > num_links()) {
    throw std::invalid_argument("topology: link id out of range");
  }
  return link_id <= half ? link_id : link_id - half;
}

Topology build_topology(int n_vehicles, const std::set<int>& fd_positions,
                        const std::vector<double>& gamma_by_hops) {
  return Topology(n_vehicles, fd_positions, gamma_by_hops);
}

std::vector<double> default_gamma_by_hops(int n_vehicles) {
  const int max_hops = n_vehicles - 1;
  std::vector<double> g(static_cast<size_t>(max_hops), 0.9);
  g.front() = 0.8;
  g.back() = 1.0;
  return g;
}

int congestion(const Topology& topo, int link_id) {
  if (link_id < 1 || link_id > topo.num_links()) {
    throw std::invalid_argument("congestion: link id out of range");
  }
  int count = 0;
  for (const Flow& f : topo.flows()) {
    if (f.allows(link_id)) ++count;
  }
  return count;
}

bool is_feasible(const Topology& topo, const std::vector<int>& links) {
  std::vector<int> tx_count(static_cast<size_t>(topo.n_vehicles()), 0);
  std::vector<int> rx_count(static_cast<size_t>(topo.n_vehicles()), 0);
  for (int id : links) {
    const DirectionalLink& l = topo.link(id);
    ++tx_count[static_cast<size_t>(l.tx)];
    ++rx_count[static_cast<size_t>(l.rx)];
  }
  for (int i = 0; i < topo.n_vehicles(); ++i) {
    const int t = tx_count[static_cast<size_t>(i)];
    const int r = rx_count[static_cast<size_t>(i)];
    if (t > 1 || r > 1) return false;
    if (!topo.is_fd(i) && t + r > 1) return false;
  }
  return true;
}

namespace {

struct SetEnumerator {
  const Topology& topo;
  std::vector<int> tx_count;
  std::vector<int> rx_count;
  std::vector<int> current;
  std::vector<std::vector<int>> out;

  explicit SetEnumerator(const Topology& t)
      : topo(t),
        tx_count(static_cast<size_t>(t.n_vehicles()), 0),
        rx_count(static_cast<size_t>(t.n_vehicles()), 0) {}

  bool can_add(const DirectionalLink& l) const {
    if (tx_count[static_cast<size_t>(l.tx)] > 0) return false;
    if (rx_count[static_cast<size_t>(l.rx)] > 0) return false;
    if (!topo.is_fd(l.tx) && rx_count[static_cast<size_t>(l.tx)] > 0) return false;
    if (!topo.is_fd(l.rx) && tx_count[static_cast<size_t>(l.rx)] > 0) return false;
    return true;
  }

  void walk(int next_id) {
    if (next_id > topo.num_links()) {
      out.push_back(current);
      return;
    }
    const DirectionalLink& l = topo.link(next_id);
    if (can_add(l)) {
      current.push_back(next_id);
      ++tx_count[static_cast<size_t>(l.tx)];
      ++rx_count[static_cast<size_t>(l.rx)];
      walk(next_id + 1);
      --tx_count[static_cast<size_t>(l.tx)];
      --rx_count[static_cast<size_t>(l.rx)];
      current.pop_back();
    }
    walk(next_id + 1);
  }
};

}  // namespace

std::vector<std::vector<int>> enumerate_feasible_sets(const Topology& topo) {
  SetEnumerator e(topo);
  e.walk(1);
  return std::move(e.out);
}

std::vector<std::vector<int>> conflict_free_sets(const Topology& topo) {
  std::vector<std::vector<int>> maximal;
  for (auto& set : enumerate_feasible_sets(topo)) {
    bool extendable = false;
    for (int id = 1; id <= topo.num_links() && !extendable; ++id) {
      if (std::find(set.begin(), set.end(), id) != set.end()) continue;
      std::vector<int> extended = set;
      extended.push_back(id);
      extendable = is_feasible(topo, extended);
    }
    if (!extendable) maximal.push_back(std::move(set));
  }
  return maximal;
}

}  // namespace platoon
