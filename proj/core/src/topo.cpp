#include "swarmtopo/topo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace swarmtopo::topo {

namespace {

struct NearState {
  std::uint64_t claims = 0;
};

struct NearProtocol {
  using State = NearState;
  const std::vector<NodeId>* component_of;

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    const NodeId comp = (*component_of)[ctx.index()];
    if (comp) ctx.broadcast(kMember, {comp.value});
  }

  void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
    const NodeId own = (*component_of)[ctx.index()];
    // comp -> smallest member heard
    std::map<std::uint32_t, std::uint32_t> pick;
    for (const sim::Message* m : inbox) {
      if (m->kind == kMember) {
        const auto comp = static_cast<std::uint32_t>(m->payload[0]);
        if (comp == own.value) continue;
        auto [it, fresh] = pick.emplace(comp, m->sender.value);
        if (!fresh) it->second = std::min(it->second, m->sender.value);
      } else if (m->kind == kClaim) {
        for (std::size_t i = 1; i < m->payload.size(); i += 2) {
          if (static_cast<std::uint32_t>(m->payload[i]) == ctx.id().value) ++s.claims;
        }
      }
    }
    if (pick.empty()) return;
    sim::Payload out;
    for (const auto& [comp, member] : pick) {
      out.push_back(comp);
      out.push_back(member);
    }
    ctx.broadcast(kClaim, std::move(out));
  }
};

constexpr std::int64_t kMicro = 1'000'000;
constexpr std::uint32_t kMaxHop = (1u << 11) - 1;
constexpr std::int64_t kWithinMask = (std::int64_t{1} << 20) - 1;

std::int64_t within_hop(const netgraph::UnitDiskGraph& g, const boundary::FloodResult& flood, NodeIndex v,
                        std::uint32_t mu_est) {
  const auto& e = flood.best[v][0];
  const double f = e.dist <= 1 ? boundary::local_fraction(g.degree(v), mu_est) : static_cast<double>(e.anchor) / kMicro;
  return std::clamp<std::int64_t>(std::llround(f * kMicro), 0, kWithinMask);
}

std::int64_t thickness_key(const netgraph::UnitDiskGraph& g, const boundary::FloodResult& flood, NodeIndex v,
                           std::uint32_t mu_est) {
  const std::uint32_t hop = flood.hop_dist(v);
  if (hop == netgraph::kUnreachable) return -1;
  if (hop > kMaxHop) throw ProtocolError("thickness: hop distance " + std::to_string(hop) + " does not fit the key");
  return (static_cast<std::int64_t>(hop) << 52) | (within_hop(g, flood, v, mu_est) << 32) |
         static_cast<std::int64_t>(0xFFFFFFFFu - g.id(v).value);
}

ThicknessReport decode(std::int64_t key) {
  ThicknessReport r;
  if (key < 0) return r;
  r.hop_dist = static_cast<std::uint32_t>(key >> 52);
  const double within = static_cast<double>((key >> 32) & kWithinMask) / kMicro;
  r.best_node = NodeId{0xFFFFFFFFu - static_cast<std::uint32_t>(key & 0xFFFFFFFF)};
  r.frac_dist = r.hop_dist <= 1 ? within : (r.hop_dist - 1) + within;
  r.thickness_estimate = r.frac_dist;  // R = 1
  return r;
}

}  // namespace

ComponentStats make_stats(NodeId id, std::uint64_t boundary_count, std::uint64_t near_count) {
  ComponentStats s{id, boundary_count, near_count, 0.0};
  s.ratio = boundary_count == 0 ? 0.0 : static_cast<double>(near_count) / static_cast<double>(boundary_count);
  return s;
}

StatsRun component_stats(const netgraph::UnitDiskGraph& g, const boundary::TwoHopView& view,
                         const boundary::ComponentRun& comps, bool inclusive, const sim::RunOptions& options) {
  NearProtocol protocol{&comps.component_of};
  auto near = sim::run_protocol(g, protocol, std::vector<NearState>(g.size()), options);

  const sim::OverlayTopology overlay(g, view.members, view.neighbors);
  std::vector<sim::Payload> local(view.members.size());
  for (NodeIndex k = 0; k < view.members.size(); ++k) {
    const auto claims = static_cast<std::int64_t>(near.states[view.members[k]].claims);
    local[k] = {claims + (inclusive ? 1 : 0), 1};
  }
  const auto sums = tree::aggregate_on(overlay, comps.overlay_tree, tree::AggregateOp::SUM, local, options);

  StatsRun out;
  for (const auto& [root, value] : sums.at_roots) {
    out.stats.push_back(make_stats(overlay.id(root), static_cast<std::uint64_t>(value[1]),
                                   static_cast<std::uint64_t>(value[0])));
  }
  std::sort(out.stats.begin(), out.stats.end(),
            [](const ComponentStats& a, const ComponentStats& b) { return a.component_id < b.component_id; });
  out.ledger = std::move(near.ledger);
  out.ledger += sums.ledger;
  out.rounds_used = near.rounds_used + sums.rounds_used;
  return out;
}

std::vector<ComponentStats> component_stats_oracle(const netgraph::UnitDiskGraph& g,
                                                   const std::vector<NodeId>& component_of, bool inclusive) {
  std::map<NodeId, std::set<NodeIndex>> near;
  std::map<NodeId, std::uint64_t> size;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const NodeId c = component_of[v];
    if (!c) continue;
    ++size[c];
    auto& set = near[c];
    if (inclusive) set.insert(v);
    for (const NodeIndex w : g.neighbors(v)) {
      if (component_of[w] != c) set.insert(w);
    }
  }
  std::vector<ComponentStats> out;
  for (const auto& [c, n] : size) out.push_back(make_stats(c, n, near[c].size()));
  return out;
}

NodeId classify_outer(const std::vector<ComponentStats>& stats) {
  const ComponentStats* best = nullptr;
  for (const auto& s : stats) {
    if (!best || s.ratio < best->ratio ||
        (s.ratio == best->ratio && (s.boundary_count > best->boundary_count ||
                                    (s.boundary_count == best->boundary_count && s.component_id < best->component_id)))) {
      best = &s;
    }
  }
  return best ? best->component_id : kNoNode;
}

std::vector<double> fractional_distances(const netgraph::UnitDiskGraph& g, const boundary::FloodResult& flood,
                                         std::uint32_t mu_est) {
  std::vector<double> out(g.size(), std::numeric_limits<double>::infinity());
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const auto& e = flood.best[v][0];
    if (e.dist == netgraph::kUnreachable) continue;
    if (e.dist <= 1) {
      out[v] = boundary::local_fraction(g.degree(v), mu_est);
    } else {
      out[v] = (e.dist - 1) + static_cast<double>(e.anchor) / kMicro;
    }
  }
  return out;
}

ThicknessRun thickness(const netgraph::UnitDiskGraph& g, const std::vector<tree::TreeState>& main_tree,
                       const boundary::FloodResult& flood, std::uint32_t mu_est, const sim::RunOptions& options) {
  std::vector<sim::Payload> local(g.size());
  for (NodeIndex v = 0; v < g.size(); ++v) local[v] = {thickness_key(g, flood, v, mu_est)};
  const auto run = tree::aggregate(g, main_tree, tree::AggregateOp::MAX, local, options);
  return ThicknessRun{decode(run.value()[0]), run.ledger, run.rounds_used};
}

ThicknessReport thickness_oracle(const netgraph::UnitDiskGraph& g, const boundary::FloodResult& flood,
                                 std::uint32_t mu_est) {
  std::int64_t best = -1;
  for (NodeIndex v = 0; v < g.size(); ++v) best = std::max(best, thickness_key(g, flood, v, mu_est));
  return decode(best);
}

}  // namespace swarmtopo::topo
