#include <algorithm>
#include <set>

#include <stdexcept>

#include "doctest.h"
#include "platoon/topology.hpp"

using namespace platoon;

TEST_SUITE("topology") {

TEST_CASE("five-vehicle platoon counts") {
  const Topology t = build_topology(5, {});
  CHECK(t.n_members() == 3);
  CHECK(t.num_links() == 8);
  CHECK(t.num_flows() == 8);
  CHECK(t.num_bidi() == 4);
  for (int i = 0; i < 5; ++i) CHECK(t.mode(i) == DuplexMode::HD);
}

TEST_CASE("smallest platoon") {
  const Topology t = build_topology(3, {});
  CHECK(t.n_members() == 1);
  CHECK(t.num_links() == 4);
  CHECK(t.num_flows() == 4);
  CHECK(t.num_bidi() == 2);
}

TEST_CASE("duplex mode does not alter the graph") {
  const Topology hd = build_topology(5, {});
  const Topology fd = build_topology(5, {1});
  CHECK(fd.is_fd(1));
  CHECK_FALSE(fd.is_fd(0));
  CHECK_FALSE(fd.is_fd(2));
  REQUIRE(fd.num_links() == hd.num_links());
  for (int l = 1; l <= hd.num_links(); ++l) {
    CHECK(fd.link(l).tx == hd.link(l).tx);
    CHECK(fd.link(l).rx == hd.link(l).rx);
  }
}

TEST_CASE("link endpoints and mirror pairing") {
  for (int n : {3, 4, 5, 6, 7, 8}) {
    const Topology t = build_topology(n, {});
    const int half = t.num_links() / 2;
    for (int l = 1; l <= half; ++l) {
      CHECK(t.link(l).tx == l - 1);
      CHECK(t.link(l).rx == l);
      CHECK(t.link(l).dir == Direction::Right);
    }
    for (int l = half + 1; l <= t.num_links(); ++l) {
      CHECK(t.link(l).tx == l - half);
      CHECK(t.link(l).rx == l - half - 1);
      CHECK(t.link(l).dir == Direction::Left);
    }
    for (int l = 1; l <= t.num_links(); ++l) {
      CHECK(t.mirror(t.mirror(l)) == l);
      // mirror links join the same node pair
      const auto& a = t.link(l);
      const auto& b = t.link(t.mirror(l));
      CHECK(a.tx == b.rx);
      CHECK(a.rx == b.tx);
    }
    for (int b = 1; b <= t.num_bidi(); ++b) {
      CHECK(t.bidi(b).right_link == b);
      CHECK(t.bidi(b).left_link == b + half);
    }
  }
}

TEST_CASE("flows form contiguous paths with the stated endpoints") {
  for (int n : {3, 5, 7}) {
    const Topology t = build_topology(n, {});
    const int half = t.num_links() / 2;
    for (const Flow& f : t.flows()) {
      CHECK(f.hops == f.last_link - f.first_link + 1);
      if (f.dir == Direction::Right) {
        CHECK(f.source == 0);
        CHECK(f.destination == f.id);
        CHECK(f.first_link == 1);
        // hop chain: link l goes l-1 -> l, so consecutive links share a node
        for (int l = f.first_link; l < f.last_link; ++l) {
          CHECK(t.link(l).rx == t.link(l + 1).tx);
        }
      } else {
        CHECK(f.source == f.id - half);
        CHECK(f.destination == 0);
        CHECK(f.first_link == half + 1);
        for (int l = f.last_link; l > f.first_link; --l) {
          CHECK(t.link(l).rx == t.link(l - 1).tx);
        }
      }
    }
  }
}

TEST_CASE("congestion") {
  const Topology t = build_topology(5, {});
  CHECK(congestion(t, 1) == 4);
  CHECK(congestion(t, 4) == 1);
  CHECK(congestion(t, 5) == 4);
  CHECK_THROWS_AS(congestion(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(congestion(t, 9), std::invalid_argument);

  // bidirectional congestion vector for N=5
  std::vector<int> bidi;
  for (int b = 1; b <= t.num_bidi(); ++b) {
    bidi.push_back(congestion(t, b) + congestion(t, t.mirror(b)));
  }
  CHECK(bidi == std::vector<int>{8, 6, 4, 2});
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(build_topology(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_topology(5, {5}), std::invalid_argument);
  CHECK_THROWS_AS(build_topology(5, {-1}), std::invalid_argument);
}

TEST_CASE("default gammas follow the hop-count rule") {
  const Topology t = build_topology(5, {});
  CHECK(t.flow(1).gamma == doctest::Approx(0.8));
  CHECK(t.flow(2).gamma == doctest::Approx(0.9));
  CHECK(t.flow(3).gamma == doctest::Approx(0.9));
  CHECK(t.flow(4).gamma == doctest::Approx(1.0));
  CHECK(t.flow(5).gamma == doctest::Approx(0.8));  // one hop
  CHECK(t.flow(8).gamma == doctest::Approx(1.0));  // longest path
}

TEST_CASE("feasibility under one-hop interference") {
  const Topology hd = build_topology(5, {});
  CHECK(is_feasible(hd, {}));
  CHECK(is_feasible(hd, {1, 3}));
  CHECK_FALSE(is_feasible(hd, {1, 2}));  // node 1 is HD and appears in both
  CHECK_FALSE(is_feasible(hd, {1, 5}));  // both directions of one pair

  const Topology fd1 = build_topology(5, {1});
  CHECK(is_feasible(fd1, {1, 2}));  // node 1 receives on 1, transmits on 2
  CHECK_FALSE(is_feasible(fd1, {1, 5}));  // node 0 is still HD
  CHECK_FALSE(is_feasible(fd1, {2, 6}));  // node 2 is HD

  const Topology fd01 = build_topology(5, {0, 1});
  CHECK(is_feasible(fd01, {1, 5}));  // both directions need both endpoints FD
}

TEST_CASE("feasible set enumeration contains exactly the feasible subsets") {
  for (int n : {3, 4, 5}) {
    for (std::set<int> fd : {std::set<int>{}, std::set<int>{1}, std::set<int>{0, 1, 2}}) {
      const Topology t = build_topology(n, fd);
      const auto sets = enumerate_feasible_sets(t);
      // brute-force count over all subsets
      size_t expected = 0;
      const int L = t.num_links();
      for (unsigned mask = 0; mask < (1u << L); ++mask) {
        std::vector<int> links;
        for (int l = 1; l <= L; ++l) {
          if (mask & (1u << (l - 1))) links.push_back(l);
        }
        if (is_feasible(t, links)) ++expected;
      }
      CHECK(sets.size() == expected);
      for (const auto& s : sets) CHECK(is_feasible(t, s));
    }
  }
}

TEST_CASE("maximal sets are maximal and HD-restricted sets are matchings") {
  for (std::set<int> fd : {std::set<int>{}, std::set<int>{1}, std::set<int>{1, 2}}) {
    const Topology t = build_topology(5, fd);
    const auto maximal = conflict_free_sets(t);
    CHECK(!maximal.empty());
    for (const auto& s : maximal) {
      CHECK(is_feasible(t, s));
      for (int l = 1; l <= t.num_links(); ++l) {
        if (std::find(s.begin(), s.end(), l) != s.end()) continue;
        auto extended = s;
        extended.push_back(l);
        CHECK_FALSE(is_feasible(t, extended));
      }
      // links whose endpoints are all HD never share a node
      std::vector<int> seen;
      for (int l : s) {
        const auto& link = t.link(l);
        if (t.is_fd(link.tx) || t.is_fd(link.rx)) continue;
        for (int node : {link.tx, link.rx}) {
          CHECK(std::find(seen.begin(), seen.end(), node) == seen.end());
          seen.push_back(node);
        }
      }
    }
  }
}

}  // TEST_SUITE
