#include <doctest.h>

#include "helpers.hpp"
#include "swarmtopo/scoring.hpp"

using namespace swarmtopo;
using namespace swarmtopo::scoring;

TEST_CASE("ideal cutoff inverts the visibility fraction") {
  CHECK(ideal_cutoff(0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ideal_cutoff(1.0) == doctest::Approx(1.0));
  CHECK(ideal_cutoff(1.3) == ideal_cutoff(1.0));
  CHECK(geometry::visibility_fraction(ideal_cutoff(0.77)) == doctest::Approx(0.77));
}

TEST_CASE("classification score by hand") {
  const std::vector<char> b = {1, 1, 0, 0, 1};
  const std::vector<double> d = {0.1, 0.6, 0.2, 2.0, 1.7};
  const auto s = score_classification(b, d, 0.5);
  CHECK(s.precision == doctest::Approx(1.0 / 3.0));
  CHECK(s.recall == doctest::Approx(0.5));
  CHECK(s.far_nodes == 2);
  CHECK(s.far_boundary == 1);
  CHECK(s.false_boundary_rate == doctest::Approx(0.5));
  std::size_t total = 0;
  for (const auto& band : s.bands) total += band.nodes;
  CHECK(total == 5);
  CHECK_THROWS(score_classification({1}, {0.1, 0.2}, 0.5));
}

TEST_CASE("straight samples avoid corners") {
  const auto r = testutil::square_region(10);
  const auto pts = straight_samples(r, 1.0, 1.0);
  CHECK(pts.size() == 4 * 9);
  for (const auto& p : pts) CHECK(on_straight_stretch(r, p, 1.0 - 1e-9));
  CHECK_FALSE(on_straight_stretch(r, {0.3, 0.2}, 1.0));
  CHECK(on_straight_stretch(r, {5, 0.5}, 1.0));
  CHECK_THROWS(straight_samples(r, 0.0, 1.0));
}

TEST_CASE("detection counts samples near a marked node") {
  const std::vector<geometry::Point> pts = {{0, 0}, {0.5, 0}, {3, 0}};
  const auto g = netgraph::build_udg(pts);
  const std::vector<char> marked = {1, 0, 0};
  const std::vector<geometry::Point> samples = {{0.2, 0}, {3, 0}, {0, 0.25}};
  const auto s = score_detection(g, marked, samples, 0.25);
  CHECK(s.samples == 3);
  CHECK(s.hits == 2);
}

TEST_CASE("voronoi score uses the gap to the second curve") {
  std::vector<NodeReport> nodes(2);
  nodes[0].voronoi = true;
  nodes[1].voronoi = true;
  std::vector<geometry::BoundaryDistance> truth(2);
  truth[0] = {2.0, 0, 3.0, 1};
  truth[1] = {1.0, 0, 9.0, 1};
  const auto s = score_voronoi(nodes, truth);
  CHECK(s.flagged == 2);
  CHECK(s.hits == 1);
}

TEST_CASE("loop coverage within two hops") {
  const auto g = testutil::path_graph(6);
  CHECK(loop_covers(g, {0, 1, 2, 3, 4}, {NodeId{3}}));
  CHECK_FALSE(loop_covers(g, {0, 5}, {NodeId{3}}));
}
