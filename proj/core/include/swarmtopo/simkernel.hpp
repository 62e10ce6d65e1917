#pragma once

// Synchronous round executor for node state machines that talk by local
// broadcast. A message broadcast in round t is in the inbox of every receiver
// at round t + delay (delay 1 on the physical graph; 1 or 2 on the two-hop
// overlay). Inboxes are ordered by (sender ID, kind, send order). A run stops
// at global quiescence: nothing in flight and no node asked for another round.
//
// Protocol code only sees its NodeContext (own ID, neighbour IDs, round) and
// its inbox; positions and the region are never reachable from here.

#include <algorithm>
#include <array>
#include <concepts>
#include <optional>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "swarmtopo/error.hpp"
#include "swarmtopo/netgraph.hpp"

namespace swarmtopo::sim {

using Payload = std::vector<std::int64_t>;

struct Message {
  std::uint16_t kind = 0;
  NodeId sender;
  Payload payload;
  /// ID-sized fields on the wire, including the sender ID.
  std::uint32_t size_units = 1;
  /// Global send order within a run (set by the executor).
  std::uint64_t seq = 0;
};

/// Kind used in traces for bundled relay broadcasts on the overlay.
inline constexpr std::uint16_t kRelayKind = 0xFFFF;

class RoundLimitExceeded : public ProtocolError {
 public:
  RoundLimitExceeded(const std::string& what, std::vector<NodeId> stuck)
      : ProtocolError(what), stuck_(std::move(stuck)) {}

  const std::vector<NodeId>& stuck_nodes() const { return stuck_; }

 private:
  std::vector<NodeId> stuck_;
};

/// Per-node broadcast cost, in messages and ID-sized units.
struct CostLedger {
  std::vector<std::uint64_t> broadcasts_sent;
  std::vector<std::uint64_t> id_units_sent;
  std::uint64_t total_broadcasts = 0;
  std::uint64_t total_id_units = 0;

  CostLedger() = default;
  explicit CostLedger(std::size_t n) : broadcasts_sent(n, 0), id_units_sent(n, 0) {}

  void charge_units(NodeIndex v, std::uint64_t units) {
    broadcasts_sent[v] += 1;
    id_units_sent[v] += units;
    total_broadcasts += 1;
    total_id_units += units;
  }

  CostLedger& operator+=(const CostLedger& other);

  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

/// Account one broadcast of `message` by node v. Messages carry at least the
/// sender ID, so size_units == 0 is rejected.
void charge(CostLedger& ledger, NodeIndex v, const Message& message);

struct RunOptions {
  std::uint32_t max_rounds = 200'000;
  /// When set, one CSV line "round,node,kind,size_units" per broadcast.
  std::ostream* trace = nullptr;
  /// Optional first column for trace lines.
  const char* trace_phase = nullptr;
};

class NodeContext {
 public:
  NodeContext(NodeId id, NodeIndex index, std::uint32_t round, std::span<const NodeId> neighbors,
              std::vector<Message>* outbox, char* requested)
      : id_(id), index_(index), round_(round), neighbors_(neighbors), outbox_(outbox),
        requested_(requested) {}

  NodeId id() const { return id_; }
  /// Handle for protocol-side per-node tables; carries no topology.
  NodeIndex index() const { return index_; }
  std::uint32_t round() const { return round_; }
  std::span<const NodeId> neighbor_ids() const { return neighbors_; }

  void broadcast(std::uint16_t kind, Payload payload) {
    const auto units = static_cast<std::uint32_t>(1 + payload.size());
    broadcast(kind, std::move(payload), units);
  }
  void broadcast(std::uint16_t kind, Payload payload, std::uint32_t size_units) {
    outbox_->push_back(Message{kind, id_, std::move(payload), size_units, 0});
  }
  /// Keep this node scheduled next round even if its inbox is empty.
  void request_round() { *requested_ = 1; }

 private:
  NodeId id_;
  NodeIndex index_;
  std::uint32_t round_;
  std::span<const NodeId> neighbors_;
  std::vector<Message>* outbox_;
  char* requested_;
};

using Inbox = std::span<const Message* const>;

template <class P>
concept Protocol = requires(P& p, typename P::State& s, NodeContext& ctx, Inbox inbox) {
  p.init(ctx, s);
  p.on_round(ctx, s, inbox);
};

template <class State>
struct RunResult {
  std::vector<State> states;
  CostLedger ledger;
  std::uint32_t rounds_used = 0;
  std::uint64_t deliveries = 0;
};

/// Local broadcast on the physical unit disk graph.
class GraphTopology {
 public:
  explicit GraphTopology(const netgraph::UnitDiskGraph& g) : g_(&g) {}

  std::size_t size() const { return g_->size(); }
  NodeId id(NodeIndex v) const { return g_->id(v); }
  std::span<const NodeId> neighbor_ids(NodeIndex v) const { return g_->neighbor_ids(v); }
  std::size_t ledger_size() const { return g_->size(); }
  NodeIndex ledger_index(NodeIndex v) const { return v; }
  NodeId ledger_id(NodeIndex w) const { return g_->id(w); }
  std::span<const NodeIndex> relays(NodeIndex) const { return {}; }
  static constexpr std::uint32_t max_delay() { return 1; }

  template <class F>
  void for_each_receiver(NodeIndex v, F&& f) const {
    for (const NodeIndex u : g_->neighbors(v)) f(u, 1U);
  }

 private:
  const netgraph::UnitDiskGraph* g_;
};

/// Virtual links between members (boundary nodes) that are at most two hops
/// apart in the physical graph.
///
/// This is an exact, faster simulation of the naive relay protocol: a member
/// broadcasts, direct neighbours hear it next round, and every physical
/// neighbour of the sender that has at least two member neighbours rebroadcasts
/// everything it heard that round as one bundle, so two-hop members hear it a
/// round later. Members see each virtual message once. Relay bundles are
/// charged to the relaying node's ledger entry.
class OverlayTopology {
 public:
  /// `members`: physical indices, ascending. `virtual_neighbors[i]`: the IDs
  /// member i learned as its two-hop member neighbourhood.
  OverlayTopology(const netgraph::UnitDiskGraph& g, std::vector<NodeIndex> members,
                  const std::vector<std::vector<NodeId>>& virtual_neighbors);

  std::size_t size() const { return members_.size(); }
  NodeId id(NodeIndex v) const { return ids_[v]; }
  std::span<const NodeId> neighbor_ids(NodeIndex v) const {
    return {nbr_ids_.data() + offsets_[v], nbr_ids_.data() + offsets_[v + 1]};
  }
  std::size_t ledger_size() const { return g_->size(); }
  NodeIndex ledger_index(NodeIndex v) const { return members_[v]; }
  NodeId ledger_id(NodeIndex w) const { return g_->id(w); }
  std::span<const NodeIndex> relays(NodeIndex v) const {
    return {relays_.data() + relay_offsets_[v], relays_.data() + relay_offsets_[v + 1]};
  }
  std::span<const NodeIndex> members() const { return members_; }
  static constexpr std::uint32_t max_delay() { return 2; }

  template <class F>
  void for_each_receiver(NodeIndex v, F&& f) const {
    for (std::uint32_t k = offsets_[v]; k < offsets_[v + 1]; ++k) f(nbr_index_[k], delay_[k]);
  }

  /// Overlay index of a member ID, if it is one.
  std::optional<NodeIndex> index_of(NodeId id) const;

 private:
  const netgraph::UnitDiskGraph* g_;
  std::vector<NodeIndex> members_;
  std::vector<NodeId> ids_;
  std::vector<std::uint32_t> offsets_;
  std::vector<NodeId> nbr_ids_;
  std::vector<NodeIndex> nbr_index_;
  std::vector<std::uint32_t> delay_;
  std::vector<std::uint32_t> relay_offsets_;
  std::vector<NodeIndex> relays_;
};

template <class Topology, Protocol P>
RunResult<typename P::State> run_protocol(const Topology& topo, P& protocol,
                                          std::vector<typename P::State> states,
                                          const RunOptions& options = {}) {
  constexpr std::uint32_t kSlots = 3;  // covers delays up to 2
  struct Pending {
    NodeIndex receiver;
    std::uint32_t slot;
    std::uint32_t index;
  };

  const std::size_t n = topo.size();
  if (states.size() != n) states.resize(n);

  RunResult<typename P::State> result;
  result.ledger = CostLedger(topo.ledger_size());

  std::array<std::vector<Message>, kSlots> pools;
  std::array<std::vector<Pending>, kSlots> pending;
  std::vector<char> requested(n, 0);
  std::vector<char> requested_next(n, 0);
  std::vector<std::uint32_t> inbox_offsets(n + 1, 0);
  std::vector<const Message*> inbox;
  std::vector<Message> outbox;
  std::vector<std::uint64_t> relay_units(topo.ledger_size(), 0);
  std::vector<NodeIndex> relay_touched;
  std::uint64_t seq = 0;

  auto inbox_less = [](const Message* a, const Message* b) {
    if (a->sender != b->sender) return a->sender < b->sender;
    if (a->kind != b->kind) return a->kind < b->kind;
    return a->seq < b->seq;
  };

  for (std::uint32_t round = 0;; ++round) {
    if (round >= options.max_rounds) {
      std::vector<NodeId> stuck;
      for (NodeIndex v = 0; v < n; ++v) {
        if (requested[v]) stuck.push_back(topo.id(v));
      }
      for (const auto& slot : pending) {
        for (const auto& p : slot) stuck.push_back(topo.id(p.receiver));
      }
      std::sort(stuck.begin(), stuck.end());
      stuck.erase(std::unique(stuck.begin(), stuck.end()), stuck.end());
      throw RoundLimitExceeded("round limit " + std::to_string(options.max_rounds) + " reached with " +
                                   std::to_string(stuck.size()) + " nodes still active",
                               std::move(stuck));
    }

    const std::uint32_t slot = round % kSlots;
    pools[slot].clear();

    // Bucket this round's deliveries by receiver.
    auto& due = pending[slot];
    std::fill(inbox_offsets.begin(), inbox_offsets.end(), 0);
    for (const auto& p : due) ++inbox_offsets[p.receiver + 1];
    for (std::size_t v = 0; v < n; ++v) inbox_offsets[v + 1] += inbox_offsets[v];
    inbox.resize(due.size());
    {
      std::vector<std::uint32_t> fill(inbox_offsets.begin(), inbox_offsets.end() - 1);
      for (const auto& p : due) inbox[fill[p.receiver]++] = &pools[p.slot][p.index];
    }
    result.deliveries += due.size();
    due.clear();

    for (NodeIndex v = 0; v < n; ++v) {
      const Inbox mine(inbox.data() + inbox_offsets[v], inbox.data() + inbox_offsets[v + 1]);
      if (round != 0 && mine.empty() && !requested[v]) continue;
      if (!std::is_sorted(mine.begin(), mine.end(), inbox_less)) {
        std::sort(inbox.begin() + inbox_offsets[v], inbox.begin() + inbox_offsets[v + 1], inbox_less);
      }
      outbox.clear();
      NodeContext ctx(topo.id(v), v, round, topo.neighbor_ids(v), &outbox, &requested_next[v]);
      if (round == 0) {
        protocol.init(ctx, states[v]);
      } else {
        protocol.on_round(ctx, states[v], mine);
      }
      std::stable_sort(outbox.begin(), outbox.end(),
                       [](const Message& a, const Message& b) { return a.kind < b.kind; });
      for (auto& msg : outbox) {
        msg.seq = seq++;
        charge(result.ledger, topo.ledger_index(v), msg);
        if (options.trace != nullptr) {
          if (options.trace_phase != nullptr) *options.trace << options.trace_phase << ',';
          *options.trace << round << ',' << msg.sender.value << ',' << msg.kind << ',' << msg.size_units
                         << '\n';
        }
        const auto index = static_cast<std::uint32_t>(pools[slot].size());
        for (const NodeIndex w : topo.relays(v)) {
          if (relay_units[w] == 0) relay_touched.push_back(w);
          relay_units[w] += msg.size_units + 1;
        }
        pools[slot].push_back(std::move(msg));
        topo.for_each_receiver(v, [&](NodeIndex u, std::uint32_t delay) {
          pending[(round + delay) % kSlots].push_back({u, slot, index});
        });
      }
    }

    // Relays rebroadcast their bundle in the following round.
    if (!relay_touched.empty()) {
      std::sort(relay_touched.begin(), relay_touched.end());
      for (const NodeIndex w : relay_touched) {
        result.ledger.charge_units(w, 1 + relay_units[w]);
        if (options.trace != nullptr) {
          if (options.trace_phase != nullptr) *options.trace << options.trace_phase << ',';
          *options.trace << round + 1 << ',' << topo.ledger_id(w).value << ',' << kRelayKind << ',' << 1 + relay_units[w]
                         << '\n';
        }
        relay_units[w] = 0;
      }
      relay_touched.clear();
    }

    requested.swap(requested_next);
    std::fill(requested_next.begin(), requested_next.end(), 0);
    const bool in_flight = !pending[(round + 1) % kSlots].empty() || !pending[(round + 2) % kSlots].empty();
    const bool wants_more = std::find(requested.begin(), requested.end(), 1) != requested.end();
    if (!in_flight && !wants_more) {
      result.rounds_used = round + 1;
      break;
    }
  }

  result.states = std::move(states);
  return result;
}

template <Protocol P>
RunResult<typename P::State> run_protocol(const netgraph::UnitDiskGraph& g, P& protocol,
                                          std::vector<typename P::State> states,
                                          const RunOptions& options = {}) {
  return run_protocol(GraphTopology(g), protocol, std::move(states), options);
}

}  // namespace swarmtopo::sim
