#include "swarmtopo/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "swarmtopo/geometry.hpp"

namespace swarmtopo::boundary {

double analytic_mu(std::size_t n, double area, double radius) {
  if (!(area > 0.0)) throw ConfigError("analytic_mu: area must be positive");
  return static_cast<double>(n - 1) * std::numbers::pi * radius * radius / area;
}

DensityEstimate estimate_mu(const netgraph::DegreeHistogram& h, double mu_analytic) {
  if (h.delta < 4) {
    throw DegenerateHistogram("density estimate needs max degree >= 4, got " + std::to_string(h.delta));
  }
  const double half = static_cast<double>(h.delta) / 2.0;
  std::optional<std::size_t> mode;
  for (std::size_t b = 0; b < h.bin_count; ++b) {
    if (h.bin_mid(b) <= half || h.counts[b] == 0) continue;
    if (!mode || h.counts[b] >= h.counts[*mode]) mode = b;
  }
  if (!mode) throw DegenerateHistogram("all histogram mass lies at or below delta/2");
  DensityEstimate est;
  est.delta = h.delta;
  est.mu_analytic = mu_analytic;
  est.mu_est = static_cast<std::uint32_t>(
      std::llround(static_cast<double>(h.degree_sums[*mode]) / static_cast<double>(h.counts[*mode])));
  return est;
}

double default_alpha() { return kDefaultAlpha; }

std::uint32_t threshold(double alpha, std::uint32_t mu_est) {
  if (alpha <= 0.0) return 0;
  return static_cast<std::uint32_t>(std::floor(alpha * mu_est + 1e-9));
}

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::BOUNDARY:
      return "boundary";
    case NodeClass::NEAR_BOUNDARY:
      return "near";
    case NodeClass::INTERIOR:
      return "interior";
  }
  return "?";
}

namespace {

struct ClassifyState {
  NodeClass cls = NodeClass::INTERIOR;
  std::vector<NodeId> boundary_neighbors;
};

struct ClassifyProtocol {
  using State = ClassifyState;
  std::uint32_t thresh;

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    // alpha = 0 means "nobody": a degree-0 node is not boundary then either
    if (thresh > 0 && ctx.neighbor_ids().size() <= thresh) {
      s.cls = NodeClass::BOUNDARY;
      ctx.broadcast(kAnnounce, {});
    }
  }

  void on_round(sim::NodeContext&, State& s, sim::Inbox inbox) const {
    for (const sim::Message* m : inbox) {
      if (m->kind != kAnnounce) continue;
      s.boundary_neighbors.push_back(m->sender);
      if (s.cls != NodeClass::BOUNDARY) s.cls = NodeClass::NEAR_BOUNDARY;
    }
  }
};

// Per-ID counters without hashing when IDs are reasonably dense.
class IdCounter {
 public:
  explicit IdCounter(std::span<const NodeId> ids) {
    std::uint32_t max_id = 0;
    for (const NodeId id : ids) max_id = std::max(max_id, id.value);
    dense_ = max_id <= 16 * ids.size() + 1024;
    if (dense_) counts_.assign(static_cast<std::size_t>(max_id) + 1, 0);
  }

  void add(NodeId id) {
    std::uint32_t& c = dense_ ? counts_[id.value] : sparse_[id.value];
    if (c == 0) touched_.push_back(id);
    ++c;
  }
  void touch(NodeId id) {
    const std::uint32_t& c = dense_ ? counts_[id.value] : sparse_[id.value];
    if (c == 0) {
      touched_.push_back(id);
      if (dense_) counts_[id.value] = kTouched; else sparse_[id.value] = kTouched;
    }
  }

  // Sorted (id, count) pairs; resets the counter.
  template <class F>
  void drain(F&& f) {
    std::sort(touched_.begin(), touched_.end());
    for (const NodeId id : touched_) {
      std::uint32_t& c = dense_ ? counts_[id.value] : sparse_[id.value];
      f(id, c == kTouched ? 0U : c);
      c = 0;
    }
    touched_.clear();
    if (!dense_) sparse_.clear();
  }

 private:
  static constexpr std::uint32_t kTouched = 0x80000000U;
  bool dense_ = true;
  std::vector<std::uint32_t> counts_;
  std::unordered_map<std::uint32_t, std::uint32_t> sparse_;
  std::vector<NodeId> touched_;
};

struct DiscoverState {
  std::vector<NodeId> v2;
  std::vector<std::uint32_t> common;
};

struct DiscoverProtocol {
  using State = DiscoverState;
  const ClassifyRun* cls;
  bool with_common;
  IdCounter* counter;

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    const auto& mine = cls->boundary_neighbors[ctx.index()];
    if (mine.empty()) return;
    sim::Payload ids;
    ids.reserve(mine.size());
    for (const NodeId id : mine) ids.push_back(id.value);
    ctx.broadcast(kList, std::move(ids));
  }

  void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
    if (cls->classes[ctx.index()] != NodeClass::BOUNDARY) return;
    for (const sim::Message* m : inbox) {
      if (m->kind != kList) continue;
      for (const std::int64_t raw : m->payload) {
        const NodeId c{static_cast<std::uint32_t>(raw)};
        if (c != ctx.id()) counter->add(c);
      }
    }
    for (const NodeId c : cls->boundary_neighbors[ctx.index()]) counter->touch(c);
    counter->drain([&](NodeId id, std::uint32_t count) {
      s.v2.push_back(id);
      if (with_common) s.common.push_back(count);
    });
  }
};

}  // namespace

ClassifyRun classify(const netgraph::UnitDiskGraph& g, std::uint32_t thresh, const sim::RunOptions& options) {
  ClassifyProtocol protocol{thresh};
  auto run = sim::run_protocol(g, protocol, std::vector<ClassifyState>(g.size()), options);
  ClassifyRun out;
  out.classes.reserve(g.size());
  out.boundary_neighbors.reserve(g.size());
  for (auto& s : run.states) {
    out.classes.push_back(s.cls);
    out.boundary_count += s.cls == NodeClass::BOUNDARY ? 1 : 0;
    out.boundary_neighbors.push_back(std::move(s.boundary_neighbors));
  }
  out.ledger = std::move(run.ledger);
  out.rounds_used = run.rounds_used;
  return out;
}

TwoHopView discover(const netgraph::UnitDiskGraph& g, const ClassifyRun& cls, bool with_common,
                    const sim::RunOptions& options) {
  IdCounter counter(g.ids());
  DiscoverProtocol protocol{&cls, with_common, &counter};
  auto run = sim::run_protocol(g, protocol, std::vector<DiscoverState>(g.size()), options);
  TwoHopView view;
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (cls.classes[v] != NodeClass::BOUNDARY) continue;
    view.members.push_back(v);
    view.neighbors.push_back(std::move(run.states[v].v2));
    if (with_common) view.common.push_back(std::move(run.states[v].common));
  }
  view.ledger = std::move(run.ledger);
  view.rounds_used = run.rounds_used;
  return view;
}

ComponentRun form_components(const netgraph::UnitDiskGraph& g, const TwoHopView& view,
                             const sim::RunOptions& options) {
  const sim::OverlayTopology overlay(g, view.members, view.neighbors);
  tree::TreeRun forest = tree::build_forest(overlay, options);

  ComponentRun out;
  out.component_of.assign(g.size(), kNoNode);
  for (NodeIndex v = 0; v < view.members.size(); ++v) {
    out.component_of[view.members[v]] = forest.states[v].root_id;
  }
  for (const NodeIndex r : tree::roots(forest.states)) {
    out.components.push_back({forest.states[r].root_id, view.members[r], {}});
  }
  std::sort(out.components.begin(), out.components.end(),
            [](const Component& a, const Component& b) { return a.id < b.id; });
  for (const NodeIndex m : view.members) {
    const NodeId c = out.component_of[m];
    auto it = std::lower_bound(out.components.begin(), out.components.end(), c,
                               [](const Component& a, NodeId id) { return a.id < id; });
    it->members.push_back(m);
  }
  out.overlay_tree = std::move(forest.states);
  out.ledger = std::move(forest.ledger);
  out.rounds_used = forest.rounds_used;
  return out;
}

std::vector<NodeId> components_oracle(const netgraph::UnitDiskGraph& g, const std::vector<NodeClass>& classes) {
  std::vector<int> label(g.size(), -1);
  std::vector<NodeId> best;
  std::vector<NodeIndex> stack;
  for (NodeIndex s = 0; s < g.size(); ++s) {
    if (classes[s] != NodeClass::BOUNDARY || label[s] >= 0) continue;
    const int comp = static_cast<int>(best.size());
    best.push_back(g.id(s));
    label[s] = comp;
    stack.assign(1, s);
    while (!stack.empty()) {
      const NodeIndex v = stack.back();
      stack.pop_back();
      best[comp] = std::max(best[comp], g.id(v));
      auto visit = [&](NodeIndex u) {
        if (classes[u] == NodeClass::BOUNDARY && label[u] < 0) {
          label[u] = comp;
          stack.push_back(u);
        }
      };
      for (const NodeIndex w : g.neighbors(v)) {
        visit(w);
        for (const NodeIndex u : g.neighbors(w)) visit(u);
      }
    }
  }
  std::vector<NodeId> out(g.size(), kNoNode);
  for (NodeIndex v = 0; v < g.size(); ++v) {
    if (label[v] >= 0) out[v] = best[label[v]];
  }
  return out;
}

double local_fraction(std::uint32_t degree, std::uint32_t mu_est) {
  const double r = mu_est == 0 ? 1.0 : static_cast<double>(degree) / static_cast<double>(mu_est);
  return geometry::invert_visibility(std::clamp(r, 0.5, 1.0));
}

namespace {

std::int64_t to_micro(double x) { return std::llround(x * 1e6); }

bool entry_less(const DistEntry& a, const DistEntry& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.comp < b.comp;
}

struct FloodState {
  std::array<DistEntry, 2> best;
  std::uint32_t rebroadcasts = 0;
};

struct FloodProtocol {
  using State = FloodState;
  const std::vector<NodeId>* component_of;
  std::uint32_t mu_est;

  void init(sim::NodeContext& ctx, State& s) const {
    s = State{};
    const NodeId comp = (*component_of)[ctx.index()];
    if (!comp) return;
    const auto own = to_micro(local_fraction(static_cast<std::uint32_t>(ctx.neighbor_ids().size()), mu_est));
    s.best[0] = {comp, 0, own};
    ctx.broadcast(kDist, {comp.value, 0, own});
    ++s.rebroadcasts;
  }

  void on_round(sim::NodeContext& ctx, State& s, sim::Inbox inbox) const {
    std::vector<DistEntry> cand;
    for (const sim::Message* m : inbox) {
      if (m->kind != kDist) continue;
      for (std::size_t i = 0; i + 2 < m->payload.size(); i += 3) {
        cand.push_back({NodeId{static_cast<std::uint32_t>(m->payload[i])},
                        static_cast<std::uint32_t>(m->payload[i + 1]) + 1, m->payload[i + 2]});
      }
    }
    if (cand.empty()) return;
    std::int64_t own = -1;
    for (auto& c : cand) {
      if (c.dist == 1) {
        if (own < 0) own = to_micro(local_fraction(static_cast<std::uint32_t>(ctx.neighbor_ids().size()), mu_est));
        c.anchor = own;
      }
    }
    // Entries already held are final: in a synchronous flood everything that
    // arrives later is at least one hop longer.
    std::sort(cand.begin(), cand.end(), [](const DistEntry& a, const DistEntry& b) {
      if (a.comp != b.comp) return a.comp < b.comp;
      if (a.dist != b.dist) return a.dist < b.dist;
      return a.anchor > b.anchor;
    });
    std::vector<DistEntry> merged;
    for (const auto& e : s.best) {
      if (e.comp) merged.push_back(e);
    }
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (i > 0 && cand[i].comp == cand[i - 1].comp) continue;
      const bool held = std::any_of(s.best.begin(), s.best.end(), [&](const DistEntry& e) { return e.comp == cand[i].comp; });
      if (!held) merged.push_back(cand[i]);
    }
    std::sort(merged.begin(), merged.end(), entry_less);
    std::array<DistEntry, 2> next{};
    for (std::size_t k = 0; k < std::min<std::size_t>(2, merged.size()); ++k) next[k] = merged[k];

    sim::Payload changed;
    for (const auto& e : next) {
      if (!e.comp) continue;
      bool seen = false;
      for (const auto& old : s.best) {
        if (old.comp == e.comp && old.dist == e.dist && old.anchor == e.anchor) seen = true;
      }
      if (!seen) {
        changed.push_back(e.comp.value);
        changed.push_back(e.dist);
        changed.push_back(e.anchor);
      }
    }
    s.best = next;
    if (!changed.empty()) {
      ctx.broadcast(kDist, std::move(changed));
      ++s.rebroadcasts;
    }
  }
};

}  // namespace

FloodResult distance_flood(const netgraph::UnitDiskGraph& g, const std::vector<NodeId>& component_of,
                           std::uint32_t mu_est, const sim::RunOptions& options) {
  FloodProtocol protocol{&component_of, mu_est};
  auto run = sim::run_protocol(g, protocol, std::vector<FloodState>(g.size()), options);
  FloodResult out;
  out.best.reserve(g.size());
  out.rebroadcasts.reserve(g.size());
  for (const auto& s : run.states) {
    out.best.push_back(s.best);
    out.rebroadcasts.push_back(s.rebroadcasts);
  }
  out.ledger = std::move(run.ledger);
  out.rounds_used = run.rounds_used;
  return out;
}

std::vector<char> detect_voronoi(const FloodResult& flood, std::uint32_t tolerance_hops) {
  std::vector<char> flags(flood.best.size(), 0);
  for (std::size_t v = 0; v < flood.best.size(); ++v) {
    const auto& b = flood.best[v];
    if (b[0].comp && b[1].comp && b[0].comp != b[1].comp && b[1].dist - b[0].dist <= tolerance_hops) flags[v] = 1;
  }
  return flags;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 26; ++k) grid.push_back(k / 20.0);
  return grid;
}

Plateau select_plateau(const std::vector<SweepPoint>& points, std::uint64_t n) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].alpha > points[i - 1].alpha)) throw ConfigError("alpha grid must be strictly increasing");
  }
  auto usable = [&](const SweepPoint& p) {
    return !p.saturated && p.component_count > 0 && 2 * p.boundary_node_count <= n;
  };
  std::optional<Plateau> best;
  for (std::size_t i = 0; i < points.size();) {
    if (!usable(points[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < points.size() && usable(points[j]) && points[j].component_count == points[i].component_count) ++j;
    const std::size_t len = j - i;
    if (len >= 2 && (!best || len > best->length)) {
      best = Plateau{points[i].alpha, points[j - 1].alpha, points[i].component_count, len};
    }
    i = j;
  }
  if (!best) throw NoPlateau("alpha sweep: no run of two or more grid points with a constant component count");
  return *best;
}

AlphaSweep alpha_sweep(const netgraph::UnitDiskGraph& g, const std::vector<tree::TreeState>& main_tree,
                       std::uint32_t mu_est, const SweepOptions& sweep_options, const sim::RunOptions& options) {
  AlphaSweep sweep;
  sweep.ledger = sim::CostLedger(g.size());
  const auto root = tree::roots(main_tree);
  const std::uint64_t n = root.empty() ? g.size() : main_tree[root.front()].total;
  const std::size_t m = sweep_options.grid.size();
  auto absorb = [&](const sim::CostLedger& ledger, std::uint32_t rounds) {
    sweep.ledger += ledger;
    sweep.rounds_used += rounds;
  };

  // One pass down with the whole threshold grid; every node then knows its
  // class at every alpha and one pass up counts boundary nodes per alpha.
  sim::Payload grid;
  for (const double alpha : sweep_options.grid) grid.push_back(threshold(alpha, mu_est));
  const auto down = tree::broadcast_down(g, main_tree, grid, options);
  absorb(down.ledger, down.rounds_used);
  std::vector<sim::Payload> flags(g.size(), sim::Payload(m, 0));
  for (NodeIndex v = 0; v < g.size(); ++v) {
    const auto& t = down.states[v].value;
    for (std::size_t i = 0; i < m; ++i) flags[v][i] = t[i] > 0 && g.degree(v) <= t[i] ? 1 : 0;
  }
  const auto bcount = tree::aggregate(g, main_tree, tree::AggregateOp::SUM, flags, options);
  absorb(bcount.ledger, bcount.rounds_used);

  // The root tells everyone which grid points are worth the 2-hop phase:
  // with more than half the nodes on the boundary a point cannot be on a
  // plateau, and those are the expensive ones.
  sim::Payload run_mask(m, 0);
  for (std::size_t i = 0; i < m; ++i) run_mask[i] = 2 * static_cast<std::uint64_t>(bcount.value()[i]) <= n ? 1 : 0;
  const auto mask = tree::broadcast_down(g, main_tree, run_mask, options);
  absorb(mask.ledger, mask.rounds_used);

  std::vector<sim::Payload> large(g.size(), sim::Payload(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    if (!run_mask[i]) continue;
    const auto cls = classify(g, static_cast<std::uint32_t>(grid[i]), options);
    absorb(cls.ledger, cls.rounds_used);
    const auto view = discover(g, cls, /*with_common=*/false, options);
    absorb(view.ledger, view.rounds_used);
    const auto comps = form_components(g, view, options);
    absorb(comps.ledger, comps.rounds_used);
    // each overlay root knows its component size from the completion wave
    for (NodeIndex k = 0; k < view.members.size(); ++k) {
      const auto& st = comps.overlay_tree[k];
      if (!st.parent && st.total >= sweep_options.min_component_size) large[view.members[k]][i] = 1;
    }
  }
  const auto counts = tree::aggregate(g, main_tree, tree::AggregateOp::COMPONENT_COUNT, large, options);
  absorb(counts.ledger, counts.rounds_used);

  for (std::size_t i = 0; i < m; ++i) {
    SweepPoint p{sweep_options.grid[i], static_cast<std::uint32_t>(counts.value()[i]),
                 static_cast<std::uint64_t>(bcount.value()[i])};
    p.saturated = run_mask[i] == 0;
    sweep.points.push_back(p);
  }

  try {
    sweep.plateau = select_plateau(sweep.points, n);
    sweep.alpha_star = (sweep.plateau->alpha_lo + sweep.plateau->alpha_hi) / 2.0;
  } catch (const NoPlateau&) {
    sweep.fallback = true;
    sweep.alpha_star = default_alpha();
  }
  return sweep;
}

}  // namespace swarmtopo::boundary
