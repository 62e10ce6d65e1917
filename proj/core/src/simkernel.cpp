#include "swarmtopo/simkernel.hpp"

#include <stdexcept>

namespace swarmtopo::sim {

CostLedger& CostLedger::operator+=(const CostLedger& other) {
  if (broadcasts_sent.size() < other.broadcasts_sent.size()) {
    broadcasts_sent.resize(other.broadcasts_sent.size(), 0);
    id_units_sent.resize(other.id_units_sent.size(), 0);
  }
  for (std::size_t v = 0; v < other.broadcasts_sent.size(); ++v) {
    broadcasts_sent[v] += other.broadcasts_sent[v];
    id_units_sent[v] += other.id_units_sent[v];
  }
  total_broadcasts += other.total_broadcasts;
  total_id_units += other.total_id_units;
  return *this;
}

void charge(CostLedger& ledger, NodeIndex v, const Message& message) {
  if (message.size_units == 0) throw std::invalid_argument("message with zero size units");
  ledger.charge_units(v, message.size_units);
}

OverlayTopology::OverlayTopology(const netgraph::UnitDiskGraph& g, std::vector<NodeIndex> members,
                                 const std::vector<std::vector<NodeId>>& virtual_neighbors)
    : g_(&g), members_(std::move(members)) {
  if (virtual_neighbors.size() != members_.size()) {
    throw std::invalid_argument("overlay: one neighbour list per member expected");
  }
  if (!std::is_sorted(members_.begin(), members_.end())) {
    throw std::invalid_argument("overlay: members must be ascending");
  }
  ids_.reserve(members_.size());
  for (const NodeIndex m : members_) ids_.push_back(g.id(m));

  std::vector<char> is_member(g.size(), 0);
  for (const NodeIndex m : members_) is_member[m] = 1;

  offsets_.assign(members_.size() + 1, 0);
  for (NodeIndex v = 0; v < members_.size(); ++v) {
    std::vector<NodeId> nbrs = virtual_neighbors[v];
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    const auto phys = g.neighbor_ids(members_[v]);
    for (const NodeId u : nbrs) {
      const auto idx = index_of(u);
      if (!idx || *idx == v) continue;
      nbr_ids_.push_back(u);
      nbr_index_.push_back(*idx);
      delay_.push_back(std::binary_search(phys.begin(), phys.end(), u) ? 1U : 2U);
    }
    offsets_[v + 1] = static_cast<std::uint32_t>(nbr_ids_.size());
  }

  relay_offsets_.assign(members_.size() + 1, 0);
  std::vector<std::uint32_t> member_degree(g.size(), 0);
  for (const NodeIndex m : members_) {
    for (const NodeIndex w : g.neighbors(m)) ++member_degree[w];
  }
  for (NodeIndex v = 0; v < members_.size(); ++v) {
    for (const NodeIndex w : g.neighbors(members_[v])) {
      if (member_degree[w] >= 2) relays_.push_back(w);
    }
    relay_offsets_[v + 1] = static_cast<std::uint32_t>(relays_.size());
  }
}

std::optional<NodeIndex> OverlayTopology::index_of(NodeId id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - ids_.begin());
}

}  // namespace swarmtopo::sim
