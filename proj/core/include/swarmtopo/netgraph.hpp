#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "swarmtopo/geometry.hpp"

namespace swarmtopo {

/// Globally unique node identifier, the only name a node has for itself and
/// its neighbours. Valid IDs are >= 1; 0 is reserved as "none" on the wire.
struct NodeId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const NodeId&) const = default;
  constexpr explicit operator bool() const { return value != 0; }
};

inline constexpr NodeId kNoNode{0};

/// Dense handle of a node inside one graph (or overlay). Indices are ordered
/// like the IDs they stand for.
using NodeIndex = std::uint32_t;

}  // namespace swarmtopo

namespace swarmtopo::netgraph {

struct Node {
  NodeId id;
  geometry::Point position;
};

/// Unit disk graph: u and v are adjacent iff |p(u) - p(v)| <= R.
///
/// Nodes are stored in ascending ID order, so adjacency lists (kept sorted by
/// index) are also sorted by ID. The graph is immutable after construction.
class UnitDiskGraph {
 public:
  UnitDiskGraph() = default;

  std::size_t size() const { return ids_.size(); }
  double radius() const { return radius_; }

  NodeId id(NodeIndex v) const { return ids_[v]; }
  const geometry::Point& position(NodeIndex v) const { return positions_[v]; }
  std::span<const NodeId> ids() const { return ids_; }
  std::span<const geometry::Point> positions() const { return positions_; }

  std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::span<const NodeId> neighbor_ids(NodeIndex v) const {
    return {adjacency_ids_.data() + offsets_[v], adjacency_ids_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t edge_count() const { return adjacency_.size() / 2; }

  std::optional<NodeIndex> index_of(NodeId id) const;

  friend bool operator==(const UnitDiskGraph&, const UnitDiskGraph&) = default;

 private:
  friend UnitDiskGraph build_udg(std::span<const Node> nodes, double radius);

  double radius_ = 1.0;
  std::vector<NodeId> ids_;
  std::vector<geometry::Point> positions_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<NodeIndex> adjacency_;
  std::vector<NodeId> adjacency_ids_;
};

/// Uniform grid bucketing with cell size R. IDs must be unique and non-zero;
/// input order does not matter.
UnitDiskGraph build_udg(std::span<const Node> nodes, double radius = 1.0);

/// Convenience overload: the node at position i gets ID i + 1.
UnitDiskGraph build_udg(std::span<const geometry::Point> positions, double radius = 1.0);

/// Attach a seeded random permutation of 1..n as IDs (Fisher-Yates over
/// CounterRng), so IDs carry no positional information.
std::vector<Node> assign_random_ids(std::span<const geometry::Point> positions, std::uint64_t seed);

std::uint32_t degree(const UnitDiskGraph& g, NodeIndex v);
std::uint32_t max_degree(const UnitDiskGraph& g);

/// Degree census over bin_count equal bins covering [0, delta]; the last bin
/// is closed. Each bin also carries the sum of the degrees that fell in it,
/// which lets the mode be reported as an actual degree rather than a bin
/// midpoint.
struct DegreeHistogram {
  std::size_t bin_count = 64;
  std::uint32_t delta = 0;
  double bin_width = 1.0;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> degree_sums;

  static DegreeHistogram empty(std::uint32_t delta, std::size_t bin_count);

  std::size_t bin_of(std::uint32_t degree) const;
  double bin_lo(std::size_t bin) const { return static_cast<double>(bin) * bin_width; }
  double bin_mid(std::size_t bin) const { return (static_cast<double>(bin) + 0.5) * bin_width; }
  void add(std::uint32_t degree);
  std::uint64_t total() const;

  friend bool operator==(const DegreeHistogram&, const DegreeHistogram&) = default;
};

inline constexpr std::size_t kDefaultBinCount = 64;
inline constexpr std::size_t kMinBinCount = 16;

DegreeHistogram histogram(const UnitDiskGraph& g, std::size_t bin_count = kDefaultBinCount);

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Multi-source BFS hop counts; kUnreachable where no source is reachable.
std::vector<std::uint32_t> hop_bfs(const UnitDiskGraph& g, std::span<const NodeIndex> sources);

bool is_connected(const UnitDiskGraph& g);

/// Debug dumps: "u v" per undirected edge (u < v by ID, sorted) and "id,x,y".
void write_edge_list(std::ostream& out, const UnitDiskGraph& g);
void write_positions_csv(std::ostream& out, const UnitDiskGraph& g);

}  // namespace swarmtopo::netgraph
