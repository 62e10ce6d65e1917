#include "swarmtopo/convergetree.hpp"

#include <ostream>

namespace swarmtopo::tree {

TreeRun build_tree(const netgraph::UnitDiskGraph& g, const sim::RunOptions& options) {
  TreeRun run = build_forest(sim::GraphTopology(g), options);
  const auto rs = roots(run.states);
  if (rs.size() > 1) {
    const NodeId top = run.states[rs.back()].root_id;
    std::vector<NodeId> stranded;
    for (NodeIndex v = 0; v < g.size(); ++v) {
      if (run.states[v].root_id != top) stranded.push_back(g.id(v));
    }
    throw sim::RoundLimitExceeded("tree: graph is disconnected, " + std::to_string(stranded.size()) +
                                      " nodes never joined the max-ID wave",
                                  std::move(stranded));
  }
  return run;
}

std::vector<NodeIndex> roots(const std::vector<TreeState>& states) {
  std::vector<NodeIndex> out;
  for (NodeIndex v = 0; v < states.size(); ++v) {
    if (!states[v].parent) out.push_back(v);
  }
  return out;
}

std::uint32_t partial_units(AggregateOp, std::size_t fields) {
  // sender plus one unit per field; MAX/SUM carry one value, the histogram
  // carries counts and degree sums per bin
  return 1 + static_cast<std::uint32_t>(fields);
}

void combine(AggregateOp op, sim::Payload& into, const sim::Payload& from) {
  if (into.size() != from.size()) throw ProtocolError("aggregate: partial of the wrong length");
  for (std::size_t i = 0; i < into.size(); ++i) {
    if (op == AggregateOp::MAX) {
      into[i] = std::max(into[i], from[i]);
    } else {
      into[i] += from[i];
    }
  }
}

AggregateRun aggregate(const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree, AggregateOp op,
                       const std::vector<sim::Payload>& local, const sim::RunOptions& options) {
  return aggregate_on(sim::GraphTopology(g), tree, op, local, options);
}

std::vector<sim::Payload> degree_values(const netgraph::UnitDiskGraph& g) {
  std::vector<sim::Payload> out(g.size());
  for (NodeIndex v = 0; v < g.size(); ++v) out[v] = {g.degree(v)};
  return out;
}

std::vector<sim::Payload> unit_values(std::size_t n) { return std::vector<sim::Payload>(n, sim::Payload{1}); }

std::vector<sim::Payload> histogram_values(const netgraph::UnitDiskGraph& g, std::uint32_t delta,
                                           std::size_t bin_count) {
  const auto shape = netgraph::DegreeHistogram::empty(delta, bin_count);
  std::vector<sim::Payload> out(g.size(), sim::Payload(2 * bin_count, 0));
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const std::size_t b = shape.bin_of(g.degree(v));
    out[v][b] = 1;
    out[v][bin_count + b] = g.degree(v);
  }
  return out;
}

netgraph::DegreeHistogram histogram_from_payload(const sim::Payload& merged, std::uint32_t delta,
                                                 std::size_t bin_count) {
  if (merged.size() != 2 * bin_count) throw ProtocolError("histogram payload has the wrong length");
  auto h = netgraph::DegreeHistogram::empty(delta, bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) {
    h.counts[b] = static_cast<std::uint64_t>(merged[b]);
    h.degree_sums[b] = static_cast<std::uint64_t>(merged[bin_count + b]);
  }
  return h;
}

BroadcastRun broadcast_down(const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree,
                            const sim::Payload& value, const sim::RunOptions& options) {
  std::vector<sim::Payload> values(g.size());
  for (const NodeIndex r : roots(tree)) values[r] = value;
  return broadcast_down_on(sim::GraphTopology(g), tree, values, options);
}

void check_tree(const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree) {
  if (tree.size() != g.size()) throw OracleError("tree check: state count differs from node count");
  std::size_t edges = 0;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const auto& s = tree[v];
    const auto nbrs = g.neighbor_ids(v);
    if (s.parent) {
      ++edges;
      if (!std::binary_search(nbrs.begin(), nbrs.end(), s.parent)) {
        throw OracleError("tree check: parent of " + std::to_string(g.id(v).value) + " is not a neighbour");
      }
      const auto p = g.index_of(s.parent);
      const auto& pc = tree[*p].children;
      if (!std::binary_search(pc.begin(), pc.end(), g.id(v))) {
        throw OracleError("tree check: parent/child links disagree at " + std::to_string(g.id(v).value));
      }
      if (tree[*p].root_id != s.root_id) throw OracleError("tree check: root disagrees along an edge");
    }
    for (const NodeId c : s.children) {
      const auto ci = g.index_of(c);
      if (!ci || tree[*ci].parent != g.id(v)) {
        throw OracleError("tree check: child link without parent link at " + std::to_string(g.id(v).value));
      }
    }
  }
  // Acyclic: walking parents from any node reaches a root within n steps.
  for (NodeIndex v = 0; v < g.size(); ++v) {
    NodeIndex u = v;
    std::size_t steps = 0;
    while (tree[u].parent) {
      u = *g.index_of(tree[u].parent);
      if (++steps > g.size()) throw OracleError("tree check: cycle through " + std::to_string(g.id(v).value));
    }
    if (g.id(u) != tree[v].root_id) throw OracleError("tree check: root_id does not match the actual root");
  }
  if (edges + roots(tree).size() != g.size()) throw OracleError("tree check: wrong edge count");
}

void write_tree_csv(std::ostream& out, const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree) {
  out << "id,parent_id,subtree_size\n";
  for (NodeIndex v = 0; v < g.size(); ++v) {
    out << g.id(v).value << ',' << tree[v].parent.value << ',' << tree[v].subtree_size << '\n';
  }
}

}  // namespace swarmtopo::tree
