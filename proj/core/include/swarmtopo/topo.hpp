#pragma once

// Higher-order parameters from recognized boundaries: strip ratios for the
// outer boundary, fractional boundary distance and thickness.

#include <cstdint>
#include <vector>

#include "swarmtopo/boundary.hpp"
#include "swarmtopo/convergetree.hpp"
#include "swarmtopo/netgraph.hpp"
#include "swarmtopo/simkernel.hpp"

namespace swarmtopo::topo {

enum MsgKind : std::uint16_t {
  kMember = 40,
  kClaim = 41,
};

struct ComponentStats {
  NodeId component_id;
  std::uint64_t boundary_count = 0;  // |D|
  std::uint64_t near_count = 0;      // |N(D)|
  double ratio = 0.0;
};

struct StatsRun {
  std::vector<ComponentStats> stats;  // ascending by component id
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

/// Members announce their component; every other node adjacent to a member
/// claims one member per component it touches, and each component sums its
/// claims over the overlay tree. With `inclusive` the members count too.
StatsRun component_stats(const netgraph::UnitDiskGraph& g, const boundary::TwoHopView& view,
                         const boundary::ComponentRun& comps, bool inclusive = true,
                         const sim::RunOptions& options = {});

/// Same numbers by direct set construction.
std::vector<ComponentStats> component_stats_oracle(const netgraph::UnitDiskGraph& g,
                                                   const std::vector<NodeId>& component_of, bool inclusive = true);

/// Builds stats from given counts (ratio filled in).
ComponentStats make_stats(NodeId id, std::uint64_t boundary_count, std::uint64_t near_count);

/// Lowest near/boundary ratio; ties go to the larger component, then the
/// smaller id. Returns kNoNode for an empty list.
NodeId classify_outer(const std::vector<ComponentStats>& stats);

/// Per node, in R units. Hop 0 and 1 use the node's own degree; farther
/// nodes step back (hop - 1) hops and add the anchor carried by the flood.
/// Nodes the flood never reached get +infinity.
std::vector<double> fractional_distances(const netgraph::UnitDiskGraph& g, const boundary::FloodResult& flood,
                                         std::uint32_t mu_est);

struct ThicknessReport {
  NodeId best_node;
  std::uint32_t hop_dist = 0;
  double frac_dist = 0.0;
  double thickness_estimate = 0.0;
};

struct ThicknessRun {
  ThicknessReport report;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

/// MAX convergecast of (hop, fraction within the hop, -id) packed in one key.
ThicknessRun thickness(const netgraph::UnitDiskGraph& g, const std::vector<tree::TreeState>& main_tree,
                       const boundary::FloodResult& flood, std::uint32_t mu_est,
                       const sim::RunOptions& options = {});

/// Centralized argmax with the same ordering.
ThicknessReport thickness_oracle(const netgraph::UnitDiskGraph& g, const boundary::FloodResult& flood,
                                 std::uint32_t mu_est);

}  // namespace swarmtopo::topo
