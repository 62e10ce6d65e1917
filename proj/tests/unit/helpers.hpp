#pragma once

#include <vector>

#include "swarmtopo/geometry.hpp"
#include "swarmtopo/netgraph.hpp"
#include "swarmtopo/rng.hpp"

namespace testutil {

using swarmtopo::geometry::Point;

inline swarmtopo::geometry::Polygon square(double lo, double hi) {
  return {{{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}}};
}

inline swarmtopo::geometry::Region square_region(double side) {
  return swarmtopo::geometry::Region({square(0.0, side)});
}

// Random IDs on uniform points in a square.
inline swarmtopo::netgraph::UnitDiskGraph random_graph(double side, std::size_t n, std::uint64_t seed) {
  const auto pts = swarmtopo::geometry::sample_uniform(square_region(side), n, seed);
  const auto nodes = swarmtopo::netgraph::assign_random_ids(pts, seed + 17);
  return swarmtopo::netgraph::build_udg(nodes);
}

inline swarmtopo::netgraph::UnitDiskGraph path_graph(std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({0.9 * static_cast<double>(i), 0.0});
  return swarmtopo::netgraph::build_udg(pts);
}

}  // namespace testutil
