#pragma once

// Leader election, spanning tree and tree aggregation.
//
// The tree is an extinction-style echo on the max-ID flood: every node starts
// a wave carrying its own ID, joins any larger wave it hears of, and only the
// largest wave ever echoes back to its origin. The root then sends COMPLETE
// down the tree so every node learns termination from inside the protocol.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <iosfwd>
#include <vector>

#include "swarmtopo/netgraph.hpp"
#include "swarmtopo/simkernel.hpp"

namespace swarmtopo::tree {

enum MsgKind : std::uint16_t {
  kExplore = 1,   // (cand, hop, parent)
  kSize = 2,      // (cand, subtree size)
  kComplete = 3,  // (cand, total)
  kPartial = 4,   // aggregate values
  kValue = 5,     // broadcast_down value
};

struct TreeState {
  NodeId root_id;
  NodeId parent;  // kNoNode at the root
  std::vector<NodeId> children;
  std::uint32_t subtree_size = 1;
  std::uint32_t hop = 0;
  /// Node count of the whole tree, known at every node after COMPLETE.
  std::uint32_t total = 0;
  bool complete = false;
  std::uint32_t completion_round = 0;
  std::uint32_t explores_sent = 0;

  // wave bookkeeping
  std::uint32_t heard = 0;
  std::uint32_t reports = 0;
  std::uint32_t report_sum = 0;
  bool echoed = false;
};

/// The echo engine. Works on any topology the executor accepts; on the
/// boundary overlay it yields one tree per component.
struct EchoTree {
  using State = TreeState;

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    s.root_id = ctx.id();
    if (ctx.neighbor_ids().empty()) {
      s.complete = true;
      s.total = 1;
      s.completion_round = ctx.round();
      return;
    }
    explore(ctx, s);
  }

  void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
    NodeId best = s.root_id;
    NodeId best_from = kNoNode;
    std::uint32_t best_hop = 0;
    for (const sim::Message* m : inbox) {
      if (m->kind != kExplore) continue;
      const NodeId cand{static_cast<std::uint32_t>(m->payload[0])};
      if (cand > best) {  // inbox is sorted by sender, so the first carrier wins ties
        best = cand;
        best_from = m->sender;
        best_hop = static_cast<std::uint32_t>(m->payload[1]);
      }
    }
    if (best_from) {
      s.root_id = best;
      s.parent = best_from;
      s.hop = best_hop + 1;
      s.children.clear();
      s.heard = 0;
      s.reports = 0;
      s.report_sum = 0;
      s.echoed = false;
      explore(ctx, s);
    }

    for (const sim::Message* m : inbox) {
      if (m->kind != kExplore || NodeId{static_cast<std::uint32_t>(m->payload[0])} != s.root_id) continue;
      ++s.heard;
      if (NodeId{static_cast<std::uint32_t>(m->payload[2])} == ctx.id()) {
        s.children.insert(std::lower_bound(s.children.begin(), s.children.end(), m->sender), m->sender);
      }
    }
    for (const sim::Message* m : inbox) {
      if (m->kind != kSize || NodeId{static_cast<std::uint32_t>(m->payload[0])} != s.root_id) continue;
      if (!std::binary_search(s.children.begin(), s.children.end(), m->sender)) continue;
      ++s.reports;
      s.report_sum += static_cast<std::uint32_t>(m->payload[1]);
    }

    if (!s.echoed && s.heard == ctx.neighbor_ids().size() && s.reports == s.children.size()) {
      s.echoed = true;
      s.subtree_size = 1 + s.report_sum;
      if (s.parent) {
        ctx.broadcast(kSize, {s.root_id.value, s.subtree_size});
      } else {
        finish(ctx, s, s.subtree_size);
      }
    }

    if (!s.complete && s.parent) {
      for (const sim::Message* m : inbox) {
        if (m->kind == kComplete && m->sender == s.parent &&
            NodeId{static_cast<std::uint32_t>(m->payload[0])} == s.root_id) {
          finish(ctx, s, static_cast<std::uint32_t>(m->payload[1]));
          break;
        }
      }
    }
  }

 private:
  static void explore(sim::NodeContext& ctx, State& s) {
    ctx.broadcast(kExplore, {s.root_id.value, s.hop, s.parent.value});
    ++s.explores_sent;
  }

  static void finish(sim::NodeContext& ctx, State& s, std::uint32_t total) {
    s.complete = true;
    s.total = total;
    s.completion_round = ctx.round();
    if (!s.children.empty()) ctx.broadcast(kComplete, {s.root_id.value, total});
  }
};

struct TreeRun {
  std::vector<TreeState> states;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
};

/// Run the echo engine on any topology and check that the protocol's own
/// completion knowledge agrees with executor quiescence. On the physical
/// graph they are equal; on the overlay the last COMPLETE may still be in
/// flight to two-hop non-children for one more round.
template <class Topology>
TreeRun build_forest(const Topology& topo, const sim::RunOptions& options = {}) {
  EchoTree protocol;
  auto run = sim::run_protocol(topo, protocol, std::vector<TreeState>(topo.size()), options);
  std::uint32_t last = 0;
  for (NodeIndex v = 0; v < run.states.size(); ++v) {
    const auto& s = run.states[v];
    if (!s.complete) {
      throw ProtocolError("tree: node " + std::to_string(topo.id(v).value) + " never learned completion");
    }
    last = std::max(last, s.completion_round);
  }
  if (topo.size() > 0 && (run.rounds_used < last + 1 || run.rounds_used > last + Topology::max_delay())) {
    throw ProtocolError("tree: completion round " + std::to_string(last) + " disagrees with quiescence after " +
                        std::to_string(run.rounds_used) + " rounds");
  }
  return {std::move(run.states), std::move(run.ledger), run.rounds_used};
}

/// Spanning tree of the whole (connected) graph, rooted at the max ID.
/// A disconnected graph leaves nodes outside the max-ID part; they are
/// reported through RoundLimitExceeded.
TreeRun build_tree(const netgraph::UnitDiskGraph& g, const sim::RunOptions& options = {});

/// Index of every tree root in `states`.
std::vector<NodeIndex> roots(const std::vector<TreeState>& states);

enum class AggregateOp { MAX, SUM, HISTOGRAM_MERGE, COMPONENT_COUNT };

/// Wire size of a PARTIAL message for a payload of `fields` values.
std::uint32_t partial_units(AggregateOp op, std::size_t fields);

/// Combine `from` into `into` (same length).
void combine(AggregateOp op, sim::Payload& into, const sim::Payload& from);

struct AggregateState {
  sim::Payload value;
  std::uint32_t waiting = 0;
  bool sent = false;
  bool done = false;  // set at roots
};

/// Leaves-to-root convergecast over an existing forest. Children are known
/// from the tree; a PARTIAL from a child is recognised by its sender.
struct Convergecast {
  using State = AggregateState;

  const std::vector<TreeState>* tree;
  const std::vector<sim::Payload>* local;
  AggregateOp op;

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    s.value = (*local)[ctx.index()];
    s.waiting = static_cast<std::uint32_t>((*tree)[ctx.index()].children.size());
    maybe_send(ctx, s);
  }

  void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
    const auto& children = (*tree)[ctx.index()].children;
    for (const sim::Message* m : inbox) {
      if (m->kind != kPartial || !std::binary_search(children.begin(), children.end(), m->sender)) continue;
      combine(op, s.value, m->payload);
      --s.waiting;
    }
    maybe_send(ctx, s);
  }

 private:
  void maybe_send(sim::NodeContext& ctx, State& s) const {
    if (s.sent || s.waiting != 0) return;
    s.sent = true;
    if ((*tree)[ctx.index()].parent) {
      ctx.broadcast(kPartial, s.value, partial_units(op, s.value.size()));
    } else {
      s.done = true;
    }
  }
};

struct AggregateRun {
  /// Final value at each root, in root index order.
  std::vector<std::pair<NodeIndex, sim::Payload>> at_roots;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;

  /// Convenience for the single-tree case.
  const sim::Payload& value() const { return at_roots.front().second; }
};

template <class Topology>
AggregateRun aggregate_on(const Topology& topo, const std::vector<TreeState>& tree, AggregateOp op,
                          const std::vector<sim::Payload>& local, const sim::RunOptions& options = {}) {
  if (local.size() != topo.size() || tree.size() != topo.size()) {
    throw std::invalid_argument("aggregate: one local value and one tree state per node expected");
  }
  Convergecast protocol{&tree, &local, op};
  auto run = sim::run_protocol(topo, protocol, std::vector<AggregateState>(topo.size()), options);
  AggregateRun out;
  for (NodeIndex v = 0; v < run.states.size(); ++v) {
    if (!run.states[v].sent) throw ProtocolError("aggregate: node " + std::to_string(topo.id(v).value) + " stalled");
    if (run.states[v].done) out.at_roots.emplace_back(v, std::move(run.states[v].value));
  }
  out.ledger = std::move(run.ledger);
  out.rounds_used = run.rounds_used;
  return out;
}

AggregateRun aggregate(const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree, AggregateOp op,
                       const std::vector<sim::Payload>& local, const sim::RunOptions& options = {});

/// Local payloads for the standard queries.
std::vector<sim::Payload> degree_values(const netgraph::UnitDiskGraph& g);
std::vector<sim::Payload> unit_values(std::size_t n);
std::vector<sim::Payload> histogram_values(const netgraph::UnitDiskGraph& g, std::uint32_t delta,
                                           std::size_t bin_count);
netgraph::DegreeHistogram histogram_from_payload(const sim::Payload& merged, std::uint32_t delta,
                                                 std::size_t bin_count);

struct DownState {
  sim::Payload value;
  bool has_value = false;
  std::uint32_t received_round = 0;
};

struct BroadcastRun {
  std::vector<DownState> states;
  sim::CostLedger ledger;
  std::uint32_t rounds_used = 0;
  /// Round at which the last node received the value (= tree depth).
  std::uint32_t completion_round = 0;
};

/// Root-to-leaves flood along the tree; every node broadcasts once.
template <class Topology>
BroadcastRun broadcast_down_on(const Topology& topo, const std::vector<TreeState>& tree,
                               const std::vector<sim::Payload>& root_values, const sim::RunOptions& options = {}) {
  struct Down {
    using State = DownState;
    const std::vector<TreeState>* tree;
    const std::vector<sim::Payload>* root_values;

    void init(sim::NodeContext& ctx, State& s) const {
      s = State{};
      if (!(*tree)[ctx.index()].parent) {
        s.value = (*root_values)[ctx.index()];
        s.has_value = true;
        ctx.broadcast(kValue, s.value);
      }
    }
    void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
      if (s.has_value) return;
      const NodeId parent = (*tree)[ctx.index()].parent;
      for (const sim::Message* m : inbox) {
        if (m->kind == kValue && m->sender == parent) {
          s.value = m->payload;
          s.has_value = true;
          s.received_round = ctx.round();
          ctx.broadcast(kValue, s.value);
          return;
        }
      }
    }
  };
  Down protocol{&tree, &root_values};
  auto run = sim::run_protocol(topo, protocol, std::vector<DownState>(topo.size()), options);
  BroadcastRun out;
  for (NodeIndex v = 0; v < run.states.size(); ++v) {
    if (!run.states[v].has_value) {
      throw ProtocolError("broadcast_down: node " + std::to_string(topo.id(v).value) + " not reached");
    }
    out.completion_round = std::max(out.completion_round, run.states[v].received_round);
  }
  out.states = std::move(run.states);
  out.ledger = std::move(run.ledger);
  out.rounds_used = run.rounds_used;
  return out;
}

/// Single-tree convenience: the root's value reaches every node.
BroadcastRun broadcast_down(const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree,
                            const sim::Payload& value, const sim::RunOptions& options = {});

/// Centralized consistency check of a forest: links symmetric, edges in the
/// topology, acyclic, one root per tree. Throws OracleError on violation.
void check_tree(const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree);

/// Debug dump "id,parent_id,subtree_size" (parent 0 at the root).
void write_tree_csv(std::ostream& out, const netgraph::UnitDiskGraph& g, const std::vector<TreeState>& tree);

}  // namespace swarmtopo::tree
