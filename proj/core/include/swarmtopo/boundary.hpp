#pragma once

// Boundary recognition from neighbourhood sizes: density estimate, the
// threshold rule, 2-hop boundary components, distance flood, Voronoi flags,
// token loops and the alpha sweep.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmtopo/convergetree.hpp"
#include "swarmtopo/error.hpp"
#include "swarmtopo/netgraph.hpp"
#include "swarmtopo/simkernel.hpp"

namespace swarmtopo::boundary {

class DegenerateHistogram : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class NoPlateau : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class LoopFailure : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

enum MsgKind : std::uint16_t {
  kAnnounce = 20,
  kList = 21,
  kDist = 22,
  kUnexclude = 30,
  kQuery = 31,
  kAvail = 32,
  kPass = 33,
  kAck = 34,
  kBack = 35,
};

/// (n - 1) * pi * R^2 / area: expected degree of a node whose disk lies inside.
double analytic_mu(std::size_t n, double area, double radius = 1.0);

struct DensityEstimate {
  std::uint32_t mu_est = 0;
  double mu_analytic = 0.0;
  std::uint32_t delta = 0;
};

/// Mode of the histogram restricted to bins whose midpoint exceeds delta/2
/// (ties go to the higher bin); reported as the rounded mean degree of the
/// nodes in that bin.
DensityEstimate estimate_mu(const netgraph::DegreeHistogram& h, double mu_analytic = 0.0);

inline constexpr double kDefaultAlpha = 0.77;
double default_alpha();

/// floor(alpha * mu_est), with a little slack so 0.5 * 180 stays 90.
std::uint32_t threshold(double alpha, std::uint32_t mu_est);

enum class NodeClass : std::uint8_t { INTERIOR = 0, NEAR_BOUNDARY = 1, BOUNDARY = 2 };
const char* to_string(NodeClass c);

struct ClassifyRun {
  std::vector<NodeClass> classes;
  /// Per node: IDs of boundary neighbours learned from announcements.
  std::vector<std::vector<NodeId>> boundary_neighbors;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
  std::size_t boundary_count = 0;
};

/// Boundary nodes (degree <= thresh) announce themselves once; non-boundary
/// receivers become NEAR_BOUNDARY.
ClassifyRun classify(const netgraph::UnitDiskGraph& g, std::uint32_t thresh, const sim::RunOptions& options = {});

/// What a boundary node learns about boundary nodes within two hops.
struct TwoHopView {
  std::vector<NodeIndex> members;  // physical indices, ascending
  /// Per member: IDs of the other members within two hops, ascending.
  std::vector<std::vector<NodeId>> neighbors;
  /// Per member, parallel to `neighbors`: |N(member) & N(other)|. Only
  /// filled when requested.
  std::vector<std::vector<std::uint32_t>> common;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

/// Every node with a boundary neighbour broadcasts the list of them; each
/// boundary node merges the lists it hears.
TwoHopView discover(const netgraph::UnitDiskGraph& g, const ClassifyRun& cls, bool with_common,
                    const sim::RunOptions& options = {});

struct Component {
  NodeId id;  // root ID
  NodeIndex root;  // physical index
  std::vector<NodeIndex> members;  // physical indices, ascending
};

struct ComponentRun {
  std::vector<Component> components;  // ascending by id
  /// Per physical node: component ID for members, kNoNode otherwise.
  std::vector<NodeId> component_of;
  /// Echo tree on the overlay, indexed like TwoHopView::members.
  std::vector<tree::TreeState> overlay_tree;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

/// Echo tree over the two-hop overlay; one tree per component, the root ID
/// names the component and reaches every member with the completion wave.
ComponentRun form_components(const netgraph::UnitDiskGraph& g, const TwoHopView& view,
                             const sim::RunOptions& options = {});

/// Centralized reference partition: connected components of the boundary set
/// under hop distance <= 2. Same layout as ComponentRun::component_of.
std::vector<NodeId> components_oracle(const netgraph::UnitDiskGraph& g, const std::vector<NodeClass>& classes);

struct DistEntry {
  NodeId comp;
  std::uint32_t dist = netgraph::kUnreachable;
  /// Fractional distance of the hop-1 ancestor, in micro-R.
  std::int64_t anchor = 0;
};

struct FloodResult {
  /// Per node, the best two entries with distinct components, ordered by
  /// (dist, comp). Missing slots have comp == kNoNode.
  std::vector<std::array<DistEntry, 2>> best;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
  std::vector<std::uint32_t> rebroadcasts;

  std::uint32_t hop_dist(NodeIndex v) const { return best[v][0].dist; }
  NodeId boundary_id(NodeIndex v) const { return best[v][0].comp; }
};

/// Fractional distance of a node from its own degree (straight-boundary
/// model): invert_visibility(clamp(deg / mu_est, 0.5, 1)).
double local_fraction(std::uint32_t degree, std::uint32_t mu_est);

/// Multi-source flood from every boundary node tagged with its component.
/// Each node keeps its two best components and rebroadcasts changed entries.
FloodResult distance_flood(const netgraph::UnitDiskGraph& g, const std::vector<NodeId>& component_of,
                           std::uint32_t mu_est, const sim::RunOptions& options = {});

inline constexpr std::uint32_t kDefaultVoronoiTolerance = 2;

/// Flag nodes holding two components whose distances differ by <= tolerance.
std::vector<char> detect_voronoi(const FloodResult& flood, std::uint32_t tolerance_hops = kDefaultVoronoiTolerance);

struct TokenLoopOptions {
  /// Root becomes eligible again after max(min_hops, ceil(size / divisor)).
  std::uint32_t min_hops = 5;
  std::uint32_t size_divisor = 100;
  /// Smaller components start no token and are reported as skipped.
  std::uint32_t min_component_size = 1;
};

struct TokenLoop {
  NodeId component;
  /// Closed walk: first == last == root when closed.
  std::vector<NodeId> nodes;
  bool closed = false;
  bool skipped = false;
  std::string failure;
  std::uint32_t backtracks = 0;
  std::vector<NodeId> excluded;
};

struct TokenLoopRun {
  std::vector<TokenLoop> loops;  // one per component, same order
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

/// All component roots start a token at once (components never interact on
/// the overlay).
TokenLoopRun token_loops(const netgraph::UnitDiskGraph& g, const TwoHopView& view, const ComponentRun& comps,
                         const TokenLoopOptions& loop_options = {}, const sim::RunOptions& options = {});

/// Throws LoopFailure naming the first loop that did not close (skipped
/// components are ignored).
void require_closed(const TokenLoopRun& run);

struct SweepPoint {
  double alpha = 0.0;
  std::uint32_t component_count = 0;
  std::uint64_t boundary_node_count = 0;
  /// More than half the nodes are boundary; components were not formed.
  bool saturated = false;
};

struct Plateau {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  std::uint32_t count = 0;
  std::size_t length = 0;
};

struct AlphaSweep {
  std::vector<SweepPoint> points;
  std::optional<Plateau> plateau;
  double alpha_star = kDefaultAlpha;
  bool fallback = false;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

inline constexpr std::uint32_t kDefaultMinComponentSize = 8;

std::vector<double> default_alpha_grid();

/// Longest run (>= 2 points) of equal positive counts, ignoring points where
/// more than half the nodes are boundary; ties go to the smaller alpha.
/// Throws NoPlateau.
Plateau select_plateau(const std::vector<SweepPoint>& points, std::uint64_t n);

struct SweepOptions {
  std::vector<double> grid = default_alpha_grid();
  std::uint32_t min_component_size = kDefaultMinComponentSize;
};

/// Run classify + form_components for every grid alpha on one graph and one
/// tree. The threshold grid goes down once, boundary and component counts come
/// up as one vector each; points with more than half the nodes on the
/// boundary skip the component phase.
AlphaSweep alpha_sweep(const netgraph::UnitDiskGraph& g, const std::vector<tree::TreeState>& main_tree,
                       std::uint32_t mu_est, const SweepOptions& sweep_options = {},
                       const sim::RunOptions& options = {});

}  // namespace swarmtopo::boundary
