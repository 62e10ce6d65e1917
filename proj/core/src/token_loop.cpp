#include <algorithm>

#include "swarmtopo/boundary.hpp"

namespace swarmtopo::boundary {

namespace {

// Replies to a QUERY can take two overlay hops each way.
constexpr std::uint32_t kReplyWait = 4;

struct TokenState {
  bool is_root = false;

  bool excluded = false;
  NodeId excluded_by;
  bool visited = false;
  bool dead = false;

  bool holder = false;
  std::uint32_t hops = 0;
  std::uint32_t deadline = 0;
  NodeId pred;
  NodeId succ;
  std::vector<NodeId> avail;
  std::vector<NodeId> failed;

  bool closed = false;
  bool skipped = false;
  bool stuck = false;  // root ran out of successors
  std::uint32_t backtracks = 0;
};

struct TokenProtocol {
  using State = TokenState;

  const netgraph::UnitDiskGraph* g;
  const TwoHopView* view;
  const ComponentRun* comps;
  TokenLoopOptions loop_options;

  std::span<const NodeId> physical(const sim::NodeContext& ctx) const {
    return g->neighbor_ids(view->members[ctx.index()]);
  }

  std::uint32_t common_with(const sim::NodeContext& ctx, NodeId other) const {
    const auto& ids = view->neighbors[ctx.index()];
    const auto it = std::lower_bound(ids.begin(), ids.end(), other);
    return view->common[ctx.index()][static_cast<std::size_t>(it - ids.begin())];
  }

  void query(sim::NodeContext& ctx, State& s) const {
    s.avail.clear();
    s.deadline = ctx.round() + kReplyWait;
    ctx.broadcast(kQuery, {comps->component_of[view->members[ctx.index()]].value});
    ctx.request_round();
  }

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    const auto& t = comps->overlay_tree[ctx.index()];
    if (t.parent) return;
    s.is_root = true;
    if (t.total < loop_options.min_component_size) {
      s.skipped = true;
      return;
    }
    if (t.total <= 1) {
      s.closed = true;
      return;
    }
    s.holder = true;
    query(ctx, s);
  }

  void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
    const auto phys = physical(ctx);
    for (const sim::Message* m : inbox) {
      switch (m->kind) {
        case kUnexclude:
          if (s.excluded && s.excluded_by == m->sender) s.excluded = false;
          break;
        case kQuery:
          if (!s.holder && !s.dead && (s.is_root || (!s.excluded && !s.visited))) {
            ctx.broadcast(kAvail, {m->sender.value});
          }
          break;
        case kAvail:
          if (s.holder && NodeId{static_cast<std::uint32_t>(m->payload[0])} == ctx.id()) s.avail.push_back(m->sender);
          break;
        case kPass: {
          const NodeId to{static_cast<std::uint32_t>(m->payload[0])};
          if (to == ctx.id()) {
            s.pred = m->sender;
            s.hops = static_cast<std::uint32_t>(m->payload[1]);
            ctx.broadcast(kAck, {m->sender.value});
            if (s.is_root) {
              s.closed = true;
            } else {
              s.holder = true;
              s.failed.clear();
              query(ctx, s);
            }
          } else if (!s.is_root && !s.excluded && std::binary_search(phys.begin(), phys.end(), m->sender)) {
            s.excluded = true;
            s.excluded_by = m->sender;
          }
          break;
        }
        case kAck:
          break;
        case kBack:
          if (NodeId{static_cast<std::uint32_t>(m->payload[0])} == ctx.id() && s.succ == m->sender) {
            s.failed.push_back(m->sender);
            s.succ = kNoNode;
            ++s.backtracks;
            s.holder = true;
            ctx.broadcast(kUnexclude, {});
            query(ctx, s);
          }
          break;
        default:
          break;
      }
    }

    if (!s.holder) return;
    if (ctx.round() < s.deadline) {
      ctx.request_round();
      return;
    }
    decide(ctx, s);
  }

  void decide(sim::NodeContext& ctx, State& s) const {
    const NodeId root = comps->component_of[view->members[ctx.index()]];
    const std::uint32_t eligible_after = root_eligibility(comps->overlay_tree[ctx.index()].total);
    std::sort(s.avail.begin(), s.avail.end());
    NodeId pick = kNoNode;
    if (!s.is_root && s.hops >= eligible_after && std::binary_search(s.avail.begin(), s.avail.end(), root)) {
      pick = root;
    } else {
      std::uint32_t best_common = 0;
      for (const NodeId c : s.avail) {
        if (c == root || std::find(s.failed.begin(), s.failed.end(), c) != s.failed.end()) continue;
        const std::uint32_t k = common_with(ctx, c);
        if (!pick || k < best_common) {
          pick = c;
          best_common = k;
        }
      }
    }
    s.holder = false;
    if (pick) {
      s.succ = pick;
      if (!s.is_root) s.visited = true;
      ctx.broadcast(kPass, {pick.value, s.hops + 1});
    } else if (s.is_root) {
      s.stuck = true;
    } else {
      s.dead = true;
      ctx.broadcast(kBack, {s.pred.value});
    }
  }

  // Every member knows its component size from the completion wave. Tiny
  // components cannot afford the full detour before closing.
  std::uint32_t root_eligibility(std::uint32_t total) const {
    const std::uint32_t by_size = (total + loop_options.size_divisor - 1) / loop_options.size_divisor;
    const std::uint32_t wanted = std::max(loop_options.min_hops, by_size);
    return std::max<std::uint32_t>(1, std::min<std::uint32_t>(wanted, total >= 2 ? total - 2 : 0));
  }
};

}  // namespace

TokenLoopRun token_loops(const netgraph::UnitDiskGraph& g, const TwoHopView& view, const ComponentRun& comps,
                         const TokenLoopOptions& loop_options, const sim::RunOptions& options) {
  if (view.common.size() != view.members.size()) {
    throw std::invalid_argument("token_loops: the two-hop view must carry common-neighbour counts");
  }
  if (loop_options.size_divisor == 0) throw ConfigError("token loop size divisor must be positive");
  const sim::OverlayTopology overlay(g, view.members, view.neighbors);
  TokenProtocol protocol{&g, &view, &comps, loop_options};
  auto run = sim::run_protocol(overlay, protocol, std::vector<TokenState>(view.members.size()), options);

  TokenLoopRun out;
  for (const Component& c : comps.components) {
    TokenLoop loop;
    loop.component = c.id;
    const NodeIndex r = *overlay.index_of(c.id);
    const auto& rs = run.states[r];
    loop.closed = rs.closed;
    loop.skipped = rs.skipped;
    loop.nodes.push_back(c.id);
    if (rs.skipped) {
      loop.failure = "skipped: below the minimum component size";
    } else if (c.members.size() <= 1) {
      loop.nodes.push_back(c.id);
    } else if (rs.closed) {
      NodeIndex v = r;
      for (std::size_t steps = 0; steps <= c.members.size(); ++steps) {
        const NodeId next = run.states[v].succ;
        const auto k = overlay.index_of(next);
        if (!k) break;
        loop.nodes.push_back(next);
        v = *k;
        if (next == c.id) break;
      }
      if (loop.nodes.back() != c.id) {
        loop.closed = false;
        loop.failure = "successor chain does not return to the root";
      }
    } else {
      loop.failure = rs.stuck ? "backtracking exhausted the component" : "token did not return";
    }
    for (const NodeIndex m : c.members) {
      const auto k = *overlay.index_of(g.id(m));
      loop.backtracks += run.states[k].backtracks;
      if (run.states[k].excluded) loop.excluded.push_back(g.id(m));
    }
    out.loops.push_back(std::move(loop));
  }
  out.ledger = std::move(run.ledger);
  out.rounds_used = run.rounds_used;
  return out;
}

void require_closed(const TokenLoopRun& run) {
  for (const auto& loop : run.loops) {
    if (!loop.closed && !loop.skipped) {
      throw LoopFailure("token loop of component " + std::to_string(loop.component.value) + " failed: " + loop.failure);
    }
  }
}

}  // namespace swarmtopo::boundary
