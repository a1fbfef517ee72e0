#include <cmath>
#include <random>

#include <stdexcept>

#include "doctest.h"
#include "platoon/queueing.hpp"

using namespace platoon;

namespace {

Packet make_packet(int flow, int64_t size, int64_t slot) {
  Packet p;
  p.flow = flow;
  p.size_bits = size;
  p.arrival_slot = slot;
  return p;
}

}  // namespace

TEST_SUITE("queueing") {

TEST_CASE("no arrivals at lambda zero") {
  const Topology topo = build_topology(5, {});
  ArrivalConfig cfg;
  cfg.lambda = 0.0;
  std::mt19937_64 rng(1);
  for (int64_t t = 0; t < 1000; ++t) {
    CHECK(generate_arrivals(cfg, topo, t, rng).empty());
  }
}

TEST_CASE("poisson arrival counts match the configured rate") {
  const Topology topo = build_topology(3, {});
  ArrivalConfig cfg;
  cfg.lambda = 0.04;
  for (uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    int64_t flow1 = 0;
    for (int64_t t = 0; t < 40000; ++t) {
      for (const Packet& p : generate_arrivals(cfg, topo, t, rng)) {
        if (p.flow == 1) ++flow1;
      }
    }
    // mean 1600, sigma = sqrt(1600) = 40; allow 3 sigma
    CHECK(flow1 > 1600 - 120);
    CHECK(flow1 < 1600 + 120);
  }
}

TEST_CASE("packet sizes come from the configured set with mean 88 kbit") {
  const Topology topo = build_topology(3, {});
  ArrivalConfig cfg;
  cfg.lambda = 0.5;
  std::mt19937_64 rng(7);
  int64_t total = 0, count = 0;
  for (int64_t t = 0; t < 20000; ++t) {
    for (const Packet& p : generate_arrivals(cfg, topo, t, rng)) {
      const bool known = p.size_bits == 40000 || p.size_bits == 72000 || p.size_bits == 104000 ||
                         p.size_bits == 136000;
      CHECK(known);
      total += p.size_bits;
      ++count;
    }
  }
  CHECK(count > 1000);
  const double mean = static_cast<double>(total) / static_cast<double>(count);
  CHECK(mean == doctest::Approx(88000.0).epsilon(0.02));
}

TEST_CASE("serve moves bits FIFO with partial head progress") {
  const Topology topo = build_topology(5, {});
  QueueState q(topo);

  SUBCASE("empty queue sends nothing") {
    CHECK(q.serve(1, 1, 166000, 0) == 0);
  }

  SUBCASE("one packet inside the budget crosses whole") {
    q.enqueue(make_packet(1, 40000, 0));  // flow 1: 0 -> 1, one hop
    CHECK(q.serve(1, 1, 166000, 0) == 40000);
    q.commit();
    CHECK(q.delivered_packets() == 1);
    CHECK(q.delivered().front().delivered_slot == 0);
  }

  SUBCASE("budget smaller than the packet leaves the remainder at the head") {
    q.enqueue(make_packet(1, 136000, 0));
    CHECK(q.serve(1, 1, 100000, 0) == 100000);
    q.commit();
    CHECK(q.delivered_packets() == 0);
    CHECK(q.backlog(0, 1) == 36000);
    CHECK(q.in_flight_bits() == 100000);
    CHECK(q.serve(1, 1, 100000, 1) == 36000);
    CHECK(q.delivered_packets() == 1);
  }

  SUBCASE("budget drains several packets") {
    q.enqueue(make_packet(1, 40000, 0));
    q.enqueue(make_packet(1, 40000, 0));
    q.enqueue(make_packet(1, 40000, 0));
    CHECK(q.serve(1, 1, 100000, 0) == 100000);  // two whole packets + 20000
    CHECK(q.delivered_packets() == 2);
    CHECK(q.backlog(0, 1) == 20000);
  }

  SUBCASE("a flow cannot be served on a link outside its routing set") {
    CHECK_THROWS_AS(q.serve(2, 1, 1000, 0), std::invalid_argument);  // flow 1 allows link 1 only
    CHECK_THROWS_AS(q.serve(5, 1, 1000, 0), std::invalid_argument);
  }
}

TEST_CASE("forwarded packets become eligible only after commit") {
  const Topology topo = build_topology(5, {});
  QueueState q(topo);
  q.enqueue(make_packet(2, 40000, 0));  // flow 2: 0 -> 1 -> 2
  CHECK(q.serve(1, 2, 50000, 0) == 40000);
  // not yet in node 1's queue, so the next hop sees nothing this slot
  CHECK(q.backlog(1, 2) == 0);
  CHECK(q.serve(2, 2, 50000, 0) == 0);
  q.commit();
  CHECK(q.backlog(1, 2) == 40000);
  CHECK(q.serve(2, 2, 50000, 1) == 40000);
  q.commit();
  CHECK(q.delivered_packets() == 1);
  CHECK(latency_slots(q.delivered().front()) == 1);
}

TEST_CASE("destination nodes never hold bits") {
  const Topology topo = build_topology(5, {});
  QueueState q(topo);
  q.enqueue(make_packet(2, 40000, 0));
  q.serve(1, 2, 1 << 20, 0);
  q.commit();
  q.serve(2, 2, 1 << 20, 1);
  q.commit();
  CHECK(q.backlog(2, 2) == 0);  // node 2 is flow 2's destination
  CHECK(q.delivered_packets() == 1);
}

TEST_CASE("conservation and FIFO order under random service") {
  const Topology topo = build_topology(5, {});
  QueueState q(topo);
  ArrivalConfig cfg;
  cfg.lambda = 0.3;
  std::mt19937_64 rng(11);
  std::mt19937_64 service(12);
  std::uniform_int_distribution<int64_t> budget(0, 90000);
  for (int64_t t = 0; t < 4000; ++t) {
    for (Packet& p : generate_arrivals(cfg, topo, t, rng)) q.enqueue(std::move(p));
    // feasibility does not matter here, only the accounting
    for (const Flow& f : topo.flows()) {
      for (int l = f.first_link; l <= f.last_link; ++l) {
        q.serve(l, f.id, budget(service), t);
      }
    }
    q.commit();
    REQUIRE(q.conservation_holds());
  }
  // FIFO per flow: delivery order equals arrival order (ids are sequential)
  std::vector<uint64_t> last(static_cast<size_t>(topo.num_flows()), 0);
  for (const Packet& p : q.delivered()) {
    CHECK(p.id > last[static_cast<size_t>(p.flow - 1)]);
    last[static_cast<size_t>(p.flow - 1)] = p.id;
    CHECK(p.delivered_slot >= p.arrival_slot);
  }
  CHECK(q.delivered_packets() > 0);
}

TEST_CASE("latency bookkeeping") {
  Packet p = make_packet(1, 40000, 10);
  CHECK_THROWS_AS(latency_slots(p), std::invalid_argument);
  p.delivered_slot = 18;
  CHECK(latency_slots(p) == 8);
  CHECK(slots_to_ms(latency_slots(p), 125e-6) == doctest::Approx(1.0));
  p.delivered_slot = 10;
  CHECK(latency_slots(p) == 0);
}

}  // TEST_SUITE
