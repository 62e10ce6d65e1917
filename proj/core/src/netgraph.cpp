#include "swarmtopo/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "swarmtopo/rng.hpp"

namespace swarmtopo::netgraph {

std::optional<NodeIndex> UnitDiskGraph::index_of(NodeId id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - ids_.begin());
}

UnitDiskGraph build_udg(std::span<const Node> nodes, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("build_udg: radius must be positive");
  std::vector<Node> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!sorted[i].id) throw std::invalid_argument("build_udg: node ID 0 is reserved");
    if (i > 0 && sorted[i].id == sorted[i - 1].id) {
      throw std::invalid_argument("build_udg: duplicate node ID " + std::to_string(sorted[i].id.value));
    }
  }

  UnitDiskGraph g;
  g.radius_ = radius;
  const std::size_t n = sorted.size();
  g.ids_.reserve(n);
  g.positions_.reserve(n);
  for (const Node& node : sorted) {
    g.ids_.push_back(node.id);
    g.positions_.push_back(node.position);
  }
  g.offsets_.assign(n + 1, 0);
  if (n == 0) return g;

  // Bucket nodes into R-sized cells (counting sort by cell).
  double min_x = g.positions_[0].x, min_y = g.positions_[0].y;
  double max_x = min_x, max_y = min_y;
  for (const auto& p : g.positions_) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const auto cells_x = static_cast<std::size_t>(std::floor((max_x - min_x) / radius)) + 1;
  const auto cells_y = static_cast<std::size_t>(std::floor((max_y - min_y) / radius)) + 1;
  auto cell_of = [&](const geometry::Point& p) {
    const auto cx = std::min(cells_x - 1, static_cast<std::size_t>((p.x - min_x) / radius));
    const auto cy = std::min(cells_y - 1, static_cast<std::size_t>((p.y - min_y) / radius));
    return std::pair{cx, cy};
  };
  std::vector<std::uint32_t> cell_start(cells_x * cells_y + 1, 0);
  for (const auto& p : g.positions_) {
    const auto [cx, cy] = cell_of(p);
    ++cell_start[cy * cells_x + cx + 1];
  }
  std::partial_sum(cell_start.begin(), cell_start.end(), cell_start.begin());
  std::vector<NodeIndex> cell_nodes(n);
  {
    std::vector<std::uint32_t> fill(cell_start.begin(), cell_start.end() - 1);
    for (NodeIndex v = 0; v < n; ++v) {
      const auto [cx, cy] = cell_of(g.positions_[v]);
      cell_nodes[fill[cy * cells_x + cx]++] = v;
    }
  }

  const double r2 = radius * radius;
  std::vector<std::vector<NodeIndex>> lists(n);
  for (NodeIndex v = 0; v < n; ++v) {
    const auto& p = g.positions_[v];
    const auto [cx, cy] = cell_of(p);
    for (std::size_t ny = (cy == 0 ? 0 : cy - 1); ny <= std::min(cells_y - 1, cy + 1); ++ny) {
      for (std::size_t nx = (cx == 0 ? 0 : cx - 1); nx <= std::min(cells_x - 1, cx + 1); ++nx) {
        const std::size_t cell = ny * cells_x + nx;
        for (std::uint32_t k = cell_start[cell]; k < cell_start[cell + 1]; ++k) {
          const NodeIndex u = cell_nodes[k];
          if (u == v) continue;
          const double dx = g.positions_[u].x - p.x;
          const double dy = g.positions_[u].y - p.y;
          if (dx * dx + dy * dy <= r2) lists[v].push_back(u);
        }
      }
    }
    std::sort(lists[v].begin(), lists[v].end());
    g.offsets_[v + 1] = g.offsets_[v] + static_cast<std::uint32_t>(lists[v].size());
  }
  g.adjacency_.reserve(g.offsets_[n]);
  g.adjacency_ids_.reserve(g.offsets_[n]);
  for (NodeIndex v = 0; v < n; ++v) {
    for (const NodeIndex u : lists[v]) {
      g.adjacency_.push_back(u);
      g.adjacency_ids_.push_back(g.ids_[u]);
    }
  }
  return g;
}

UnitDiskGraph build_udg(std::span<const geometry::Point> positions, double radius) {
  std::vector<Node> nodes;
  nodes.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    nodes.push_back({NodeId{static_cast<std::uint32_t>(i + 1)}, positions[i]});
  }
  return build_udg(nodes, radius);
}

std::vector<Node> assign_random_ids(std::span<const geometry::Point> positions, std::uint64_t seed) {
  std::vector<std::uint32_t> perm(positions.size());
  std::iota(perm.begin(), perm.end(), 1U);
  CounterRng rng(seed, /*stream=*/0x1D5);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.next_below(i)]);
  }
  std::vector<Node> nodes;
  nodes.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) nodes.push_back({NodeId{perm[i]}, positions[i]});
  return nodes;
}

std::uint32_t degree(const UnitDiskGraph& g, NodeIndex v) { return g.degree(v); }

std::uint32_t max_degree(const UnitDiskGraph& g) {
  std::uint32_t best = 0;
  for (NodeIndex v = 0; v < g.size(); ++v) best = std::max(best, g.degree(v));
  return best;
}

DegreeHistogram DegreeHistogram::empty(std::uint32_t delta, std::size_t bin_count) {
  if (bin_count < kMinBinCount) throw std::invalid_argument("histogram needs at least 16 bins");
  DegreeHistogram h;
  h.bin_count = bin_count;
  h.delta = delta;
  h.bin_width = static_cast<double>(std::max<std::uint32_t>(delta, 1)) / static_cast<double>(bin_count);
  h.counts.assign(bin_count, 0);
  h.degree_sums.assign(bin_count, 0);
  return h;
}

std::size_t DegreeHistogram::bin_of(std::uint32_t degree) const {
  // Integer arithmetic: bin = floor(degree * bins / delta), clamped so that
  // degree == delta lands in the closed last bin.
  const std::uint64_t span = std::max<std::uint32_t>(delta, 1);
  const std::uint64_t bin = static_cast<std::uint64_t>(degree) * bin_count / span;
  return static_cast<std::size_t>(std::min<std::uint64_t>(bin, bin_count - 1));
}

void DegreeHistogram::add(std::uint32_t degree) {
  const std::size_t b = bin_of(degree);
  ++counts[b];
  degree_sums[b] += degree;
}

std::uint64_t DegreeHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

DegreeHistogram histogram(const UnitDiskGraph& g, std::size_t bin_count) {
  DegreeHistogram h = DegreeHistogram::empty(max_degree(g), bin_count);
  for (NodeIndex v = 0; v < g.size(); ++v) h.add(g.degree(v));
  return h;
}

std::vector<std::uint32_t> hop_bfs(const UnitDiskGraph& g, std::span<const NodeIndex> sources) {
  std::vector<std::uint32_t> dist(g.size(), kUnreachable);
  std::vector<NodeIndex> frontier;
  for (const NodeIndex s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  std::vector<NodeIndex> next;
  for (std::uint32_t level = 1; !frontier.empty(); ++level) {
    next.clear();
    for (const NodeIndex u : frontier) {
      for (const NodeIndex v : g.neighbors(u)) {
        if (dist[v] == kUnreachable) {
          dist[v] = level;
          next.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

bool is_connected(const UnitDiskGraph& g) {
  if (g.size() <= 1) return true;
  const NodeIndex source = 0;
  const auto dist = hop_bfs(g, std::span(&source, 1));
  return std::none_of(dist.begin(), dist.end(), [](std::uint32_t d) { return d == kUnreachable; });
}

void write_edge_list(std::ostream& out, const UnitDiskGraph& g) {
  for (NodeIndex v = 0; v < g.size(); ++v) {
    for (const NodeIndex u : g.neighbors(v)) {
      if (u > v) out << g.id(v).value << ' ' << g.id(u).value << '\n';
    }
  }
}

void write_positions_csv(std::ostream& out, const UnitDiskGraph& g) {
  const auto old_precision = out.precision(17);
  out << "id,x,y\n";
  for (NodeIndex v = 0; v < g.size(); ++v) {
    out << g.id(v).value << ',' << g.position(v).x << ',' << g.position(v).y << '\n';
  }
  out.precision(old_precision);
}

}  // namespace swarmtopo::netgraph
