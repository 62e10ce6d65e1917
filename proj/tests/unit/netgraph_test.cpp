#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "swarmtopo/netgraph.hpp"

using namespace swarmtopo;
using namespace swarmtopo::netgraph;

TEST_CASE("edges use the closed unit disk") {
  const std::vector<geometry::Point> pts = {{0, 0}, {1, 0}, {2.5, 0}, {0.5, 0.5}};
  const auto g = build_udg(pts);
  CHECK(g.size() == 4);
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 0);
  CHECK(g.edge_count() == 3);
  CHECK(max_degree(g) == 2);
}

TEST_CASE("grid bucketing matches brute force") {
  const auto pts = geometry::sample_uniform(testutil::square_region(12), 800, 4);
  const auto g = build_udg(pts);
  for (NodeIndex u = 0; u < g.size(); ++u) {
    std::vector<NodeIndex> expect;
    for (NodeIndex v = 0; v < g.size(); ++v) {
      if (u != v && geometry::distance(g.position(u), g.position(v)) <= 1.0) expect.push_back(v);
    }
    const auto got = g.neighbors(u);
    REQUIRE(std::vector<NodeIndex>(got.begin(), got.end()) == expect);
  }
}

TEST_CASE("nodes are stored by ascending id") {
  const std::vector<Node> nodes = {{NodeId{5}, {0, 0}}, {NodeId{2}, {0.5, 0}}, {NodeId{9}, {0.2, 0.3}}};
  const auto g = build_udg(nodes);
  CHECK(g.id(0) == NodeId{2});
  CHECK(g.id(2) == NodeId{9});
  CHECK(g.index_of(NodeId{5}) == NodeIndex{1});
  CHECK_FALSE(g.index_of(NodeId{7}));
  const auto ids = g.neighbor_ids(0);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("invalid ids are rejected") {
  CHECK_THROWS(build_udg(std::vector<Node>{{NodeId{0}, {0, 0}}}));
  CHECK_THROWS(build_udg(std::vector<Node>{{NodeId{3}, {0, 0}}, {NodeId{3}, {1, 1}}}));
}

TEST_CASE("random ids are a seeded permutation") {
  const auto pts = geometry::sample_uniform(testutil::square_region(5), 300, 1);
  const auto a = assign_random_ids(pts, 11);
  const auto b = assign_random_ids(pts, 11);
  const auto c = assign_random_ids(pts, 12);
  std::vector<std::uint32_t> ids;
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ids.push_back(a[i].id.value);
    same &= a[i].id == b[i].id;
    differs |= a[i].id != c[i].id;
    CHECK(a[i].position == pts[i]);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<std::uint32_t> expect(pts.size());
  std::iota(expect.begin(), expect.end(), 1U);
  CHECK(ids == expect);
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("histogram bins") {
  const auto g = testutil::random_graph(8, 600, 2);
  const auto h = histogram(g, 16);
  CHECK(h.delta == max_degree(g));
  CHECK(h.total() == g.size());
  CHECK(h.bin_of(h.delta) == 15);
  CHECK(h.bin_of(0) == 0);
  std::uint64_t sum = 0;
  for (auto s : h.degree_sums) sum += s;
  std::uint64_t degrees = 0;
  for (NodeIndex v = 0; v < g.size(); ++v) degrees += g.degree(v);
  CHECK(sum == degrees);
  CHECK_THROWS(histogram(g, 8));
}

TEST_CASE("hop distances") {
  const auto g = testutil::path_graph(6);
  const std::vector<NodeIndex> src = {0};
  const auto d = hop_bfs(g, src);
  CHECK(d == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});
  const std::vector<NodeIndex> ends = {0, 5};
  CHECK(hop_bfs(g, ends) == std::vector<std::uint32_t>{0, 1, 2, 2, 1, 0});
  CHECK(is_connected(g));
  const std::vector<geometry::Point> apart = {{0, 0}, {3, 0}};
  const auto split = build_udg(apart);
  CHECK_FALSE(is_connected(split));
  CHECK(hop_bfs(split, src)[1] == kUnreachable);
}

TEST_CASE("debug dumps") {
  const auto g = testutil::path_graph(3);
  std::ostringstream edges, pos;
  write_edge_list(edges, g);
  write_positions_csv(pos, g);
  CHECK(edges.str() == "1 2\n2 3\n");
  CHECK(pos.str().find("2,0.9") != std::string::npos);
}
