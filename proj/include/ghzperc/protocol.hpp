#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ghzperc/partition.hpp"
#include "ghzperc/rng.hpp"
#include "ghzperc/topology.hpp"

namespace ghzperc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Parameters of one (n,k)-GHZ experiment.
struct ProtocolParams {
  double p = 1.0;  ///< link success probability per edge per slot
  double q = 1.0;  ///< fusion success probability
  int n = 4;       ///< largest fusion group
  int k = 1;       ///< block length in slots
  double mu = kInfinity;  ///< mean qubit lifetime in slots
  int latency_slots = 0;  ///< extra slots a qubit must survive after its block

  bool ideal_memory() const noexcept { return std::isinf(mu); }

  /// Throws Error(InvalidParams) naming the first out-of-domain field.
  void validate() const;
};

using QubitIndex = std::uint32_t;

/// Structured qubit identity. `slot` is 1-based.
struct QubitId {
  EdgeId edge;
  int slot;
  NodeIndex endpoint;

  friend bool operator==(const QubitId&, const QubitId&) = default;
};

// Flat layout: link = edge * k + (slot - 1); qubit = 2 * link + side, where
// side 0 is held by the edge's `a` endpoint.
constexpr QubitIndex qubit_index(EdgeId edge, int slot, unsigned side, int k) noexcept {
  return static_cast<QubitIndex>((static_cast<std::uint64_t>(edge) * k + (slot - 1)) * 2 + side);
}
constexpr std::uint32_t link_of(QubitIndex q) noexcept { return q >> 1; }
constexpr unsigned side_of(QubitIndex q) noexcept { return q & 1u; }
constexpr QubitIndex partner_of(QubitIndex q) noexcept { return q ^ 1u; }
constexpr EdgeId edge_of(QubitIndex q, int k) noexcept {
  return static_cast<EdgeId>(link_of(q) / static_cast<std::uint32_t>(k));
}
constexpr int slot_of(QubitIndex q, int k) noexcept {
  return static_cast<int>(link_of(q) % static_cast<std::uint32_t>(k)) + 1;
}
inline NodeIndex holder_of(const NetworkTopology& topology, QubitIndex q, int k) {
  const Edge& e = topology.edge(edge_of(q, k));
  return side_of(q) == 0 ? e.a : e.b;
}
QubitId to_qubit_id(const NetworkTopology& topology, QubitIndex q, int k);
QubitIndex from_qubit_id(const NetworkTopology& topology, const QubitId& id, int k);

/// Link successes of one block and the alive flag of each qubit.
/// A qubit is alive only if its link succeeded and it has not decohered.
class LinkBlock {
 public:
  LinkBlock(std::size_t edge_count, int k)
      : edge_count_(edge_count), k_(k), success_(edge_count * k, 0), alive_(2 * edge_count * k, 0) {}

  int k() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t link_count() const noexcept { return success_.size(); }
  std::size_t qubit_slots() const noexcept { return alive_.size(); }

  bool success(EdgeId e, int slot) const noexcept { return success_[e * k_ + (slot - 1)] != 0; }
  bool link_up(std::size_t link) const noexcept { return success_[link] != 0; }
  bool alive(QubitIndex q) const noexcept { return alive_[q] != 0; }

  void set_success(std::size_t link, bool up) noexcept {
    success_[link] = up;
    alive_[2 * link] = up;
    alive_[2 * link + 1] = up;
  }
  void kill(QubitIndex q) noexcept { alive_[q] = 0; }

  std::size_t success_count() const noexcept;
  std::size_t alive_count() const noexcept;

  friend bool operator==(const LinkBlock&, const LinkBlock&) = default;

 private:
  std::size_t edge_count_;
  int k_;
  std::vector<std::uint8_t> success_;
  std::vector<std::uint8_t> alive_;
};

/// A fusion group at `node`. Members live in the owning FusionGroups.
/// `ordinal` numbers the node's groups in formation order.
struct FusionGroup {
  NodeIndex node;
  std::uint32_t ordinal;
  std::uint32_t offset;
  std::uint32_t size;
  bool succeeded = false;
  std::optional<RegionId> region;

  friend bool operator==(const FusionGroup&, const FusionGroup&) = default;
};

/// Flat storage for the groups of a block.
class FusionGroups {
 public:
  void add(NodeIndex node, std::span<const QubitIndex> members,
           std::optional<RegionId> region = std::nullopt);

  std::size_t size() const noexcept { return groups_.size(); }
  bool empty() const noexcept { return groups_.empty(); }
  const FusionGroup& operator[](std::size_t i) const noexcept { return groups_[i]; }
  FusionGroup& operator[](std::size_t i) noexcept { return groups_[i]; }
  auto begin() const noexcept { return groups_.begin(); }
  auto end() const noexcept { return groups_.end(); }
  auto begin() noexcept { return groups_.begin(); }
  auto end() noexcept { return groups_.end(); }

  std::span<const QubitIndex> members(const FusionGroup& g) const noexcept {
    return {members_.data() + g.offset, g.size};
  }
  std::span<const QubitIndex> members(std::size_t i) const noexcept { return members(groups_[i]); }

  void reserve(std::size_t groups, std::size_t members) {
    groups_.reserve(groups);
    members_.reserve(members);
  }

  friend bool operator==(const FusionGroups&, const FusionGroups&) = default;

 private:
  std::vector<FusionGroup> groups_;
  std::vector<QubitIndex> members_;
};

/// Everything sampled in one k-slot block.
struct BlockOutcome {
  ProtocolParams params;
  std::optional<ConsumerPlacement> placement;
  LinkBlock links;
  FusionGroups groups;
};

/// Attempts a link on every (edge, slot); each succeeds independently with
/// probability p. Draws are consumed in link-index order.
LinkBlock sample_links(const NetworkTopology& topology, const ProtocolParams& params,
                       RngStream& rng);

/// Lifetime in slots for a uniform draw `u`: ceil of an exponential with
/// mean `mu` (inverse CDF), at least 1.
int lifetime_slots(double u, double mu) noexcept;

/// Heralded decoherence. A qubit created in slot t must live
/// (k - t + 1) + latency_slots slots; it is marked dead otherwise. Each
/// qubit's draw is `rng.uniform_at(qubit index)`, so lifetimes stay coupled
/// across parameter changes. Identity when mu is infinite.
void apply_decoherence(LinkBlock& block, const ProtocolParams& params, const RngStream& rng);

/// Greedy grouping at one node (or one region bucket of a node).
///
/// `live_by_edge[i]` holds the node's unassigned live qubits on its i-th
/// edge and is consumed. While at least two edges still hold qubits, a group
/// of size g = min(n, #nonempty edges) is formed from the g fullest edges
/// (ties broken uniformly at random) with one uniformly drawn qubit each.
/// Edges flagged in `priority` are selected ahead of all others when
/// nonempty. Qubits left over are implicitly X-measured.
void form_fusion_groups(std::span<std::vector<QubitIndex>> live_by_edge, int n, RngStream& rng,
                        FusionGroups& out, NodeIndex node,
                        std::optional<RegionId> region = std::nullopt,
                        std::span<const std::uint8_t> priority = {});

/// Sets each group's outcome with probability q. Group (node, ordinal) uses
/// the counter-based draw `rng.uniform_at((node << 24) | ordinal)`.
void sample_fusion_outcomes(FusionGroups& groups, double q, const RngStream& rng);

/// One block of the protocol: links, decoherence, per-node grouping, fusion
/// outcomes. Without a placement every node acts as a repeater. With a
/// partition (k must be 1) each node groups its qubits per region and
/// neighbours of consumers always include the consumer link.
///
/// Sub-streams: fork(0) links, fork(1) lifetimes, fork(2).fork(node)
/// grouping, fork(3) fusion outcomes.
BlockOutcome run_block(const NetworkTopology& topology,
                       const std::optional<ConsumerPlacement>& placement,
                       const ProtocolParams& params, const RngStream& rng,
                       const ValidatedPartition* partition = nullptr);

}  // namespace ghzperc
