#include "ghzperc/protocol.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "ghzperc/error.hpp"

namespace ghzperc {

void ProtocolParams::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::InvalidParams, field + " " + why);
  };
  if (!(p >= 0.0 && p <= 1.0)) fail("p", "must lie in [0, 1], got " + std::to_string(p));
  if (!(q >= 0.0 && q <= 1.0)) fail("q", "must lie in [0, 1], got " + std::to_string(q));
  if (n < 2) fail("n", "must be at least 2, got " + std::to_string(n));
  if (k < 1) fail("k", "must be at least 1, got " + std::to_string(k));
  if (!(mu > 0.0)) fail("mu", "must be positive or infinite, got " + std::to_string(mu));
  if (latency_slots < 0) fail("latency_slots", "must be nonnegative");
}

QubitId to_qubit_id(const NetworkTopology& topology, QubitIndex q, int k) {
  return {edge_of(q, k), slot_of(q, k), holder_of(topology, q, k)};
}

QubitIndex from_qubit_id(const NetworkTopology& topology, const QubitId& id, int k) {
  const Edge& e = topology.edge(id.edge);
  if (id.endpoint != e.a && id.endpoint != e.b)
    throw Error(ErrorKind::InvalidParams, "qubit endpoint is not incident to its edge");
  if (id.slot < 1 || id.slot > k) throw Error(ErrorKind::InvalidParams, "qubit slot out of range");
  return qubit_index(id.edge, id.slot, id.endpoint == e.a ? 0 : 1, k);
}

std::size_t LinkBlock::success_count() const noexcept {
  return static_cast<std::size_t>(std::count(success_.begin(), success_.end(), 1));
}

std::size_t LinkBlock::alive_count() const noexcept {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
}

void FusionGroups::add(NodeIndex node, std::span<const QubitIndex> members,
                       std::optional<RegionId> region) {
  std::uint32_t ordinal = 0;
  if (!groups_.empty() && groups_.back().node == node) ordinal = groups_.back().ordinal + 1;
  groups_.push_back({node, ordinal, static_cast<std::uint32_t>(members_.size()),
                     static_cast<std::uint32_t>(members.size()), false, region});
  members_.insert(members_.end(), members.begin(), members.end());
}

LinkBlock sample_links(const NetworkTopology& topology, const ProtocolParams& params,
                       RngStream& rng) {
  LinkBlock block(topology.edge_count(), params.k);
  for (std::size_t l = 0; l < block.link_count(); ++l) block.set_success(l, rng.bernoulli(params.p));
  return block;
}

int lifetime_slots(double u, double mu) noexcept {
  if (std::isinf(mu)) return std::numeric_limits<int>::max();
  const double e = -mu * std::log1p(-u);
  const double t = std::ceil(e);
  if (t >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
  return std::max(1, static_cast<int>(t));
}

void apply_decoherence(LinkBlock& block, const ProtocolParams& params, const RngStream& rng) {
  if (params.ideal_memory()) return;
  const int k = block.k();
  // ceil(E) >= m  <=>  E > m - 1  <=>  1 - u < exp(-(m - 1) / mu)
  std::vector<double> survive_below(static_cast<std::size_t>(k));
  for (int slot = 1; slot <= k; ++slot) {
    const int required = (k - slot + 1) + params.latency_slots;
    survive_below[slot - 1] = required <= 1 ? 2.0 : std::exp(-(required - 1) / params.mu);
  }
  for (std::size_t l = 0; l < block.link_count(); ++l) {
    if (!block.link_up(l)) continue;
    const double threshold = survive_below[l % static_cast<std::size_t>(k)];
    for (unsigned side = 0; side < 2; ++side) {
      const auto q = static_cast<QubitIndex>(2 * l + side);
      if (!(1.0 - rng.uniform_at(q) < threshold)) block.kill(q);
    }
  }
}

void form_fusion_groups(std::span<std::vector<QubitIndex>> live_by_edge, int n, RngStream& rng,
                        FusionGroups& out, NodeIndex node, std::optional<RegionId> region,
                        std::span<const std::uint8_t> priority) {
  const std::size_t m = live_by_edge.size();
  // uniform draw without replacement == pop from a shuffled list
  for (auto& qubits : live_by_edge)
    if (qubits.size() > 1) shuffle(qubits.begin(), qubits.end(), rng);

  auto is_priority = [&](std::size_t i) { return i < priority.size() && priority[i] != 0; };

  std::array<std::uint32_t, 16> small_order{};
  std::vector<std::uint32_t> large_order;
  std::span<std::uint32_t> order;
  if (m <= small_order.size()) {
    order = std::span(small_order.data(), m);
  } else {
    large_order.resize(m);
    order = large_order;
  }
  std::array<QubitIndex, 16> small_members{};
  std::vector<QubitIndex> large_members;
  std::span<QubitIndex> members;
  if (m <= small_members.size()) {
    members = std::span(small_members.data(), m);
  } else {
    large_members.resize(m);
    members = large_members;
  }

  for (;;) {
    std::size_t nonempty = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (live_by_edge[i].empty()) continue;
      order[nonempty++] = static_cast<std::uint32_t>(i);
    }
    if (nonempty < 2) break;
    const std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(n), nonempty);
    auto chosen = order.first(nonempty);
    if (g < nonempty) {
      shuffle(chosen.begin(), chosen.end(), rng);
      // stable insertion sort: priority first, then fuller edges
      auto before = [&](std::uint32_t a, std::uint32_t b) {
        const bool pa = is_priority(a), pb = is_priority(b);
        if (pa != pb) return pa;
        return live_by_edge[a].size() > live_by_edge[b].size();
      };
      for (std::size_t i = 1; i < nonempty; ++i) {
        const std::uint32_t v = chosen[i];
        std::size_t j = i;
        for (; j > 0 && before(v, chosen[j - 1]); --j) chosen[j] = chosen[j - 1];
        chosen[j] = v;
      }
      chosen = chosen.first(g);
      std::sort(chosen.begin(), chosen.end());
    }
    for (std::size_t i = 0; i < g; ++i) {
      auto& qubits = live_by_edge[chosen[i]];
      members[i] = qubits.back();
      qubits.pop_back();
    }
    out.add(node, members.first(g), region);
  }
}

void sample_fusion_outcomes(FusionGroups& groups, double q, const RngStream& rng) {
  for (auto& g : groups) {
    const std::uint64_t counter = (static_cast<std::uint64_t>(g.node) << 24) | g.ordinal;
    g.succeeded = rng.uniform_at(counter) < q;
  }
}

BlockOutcome run_block(const NetworkTopology& topology,
                       const std::optional<ConsumerPlacement>& placement,
                       const ProtocolParams& params, const RngStream& rng,
                       const ValidatedPartition* partition) {
  params.validate();
  if (partition != nullptr) {
    if (params.k != 1)
      throw Error(ErrorKind::UnsupportedCombination, "network division requires k = 1");
    if (!placement)
      throw Error(ErrorKind::UnsupportedCombination, "network division requires consumers");
  }

  RngStream link_rng = rng.fork(0);
  LinkBlock links = sample_links(topology, params, link_rng);
  apply_decoherence(links, params, rng.fork(1));

  const int k = params.k;
  const RngStream group_root = rng.fork(2);
  FusionGroups groups;
  groups.reserve(topology.node_count() * static_cast<std::size_t>(k),
                 2 * topology.edge_count() * static_cast<std::size_t>(k));

  const std::size_t max_degree = topology.max_degree();
  std::vector<std::vector<QubitIndex>> live(max_degree);
  for (auto& v : live) v.reserve(static_cast<std::size_t>(k));
  std::vector<std::uint8_t> priority(max_degree, 0);

  for (NodeIndex u = 0; u < topology.node_count(); ++u) {
    if (placement && placement->is_consumer(u)) continue;
    const auto inc = topology.incident(u);
    RngStream node_rng = group_root.fork(u);

    auto fill = [&](std::size_t slot, const Incidence& e) {
      auto& qubits = live[slot];
      qubits.clear();
      for (int s = 1; s <= k; ++s) {
        const QubitIndex q = qubit_index(e.edge, s, e.side, k);
        if (links.alive(q)) qubits.push_back(q);
      }
    };

    if (partition == nullptr) {
      for (std::size_t i = 0; i < inc.size(); ++i) fill(i, inc[i]);
      form_fusion_groups(std::span(live.data(), inc.size()), params.n, node_rng, groups, u);
      continue;
    }

    for (RegionId r : kAllRegions) {
      std::size_t count = 0;
      for (const auto& e : inc) {
        if (partition->region(e.edge) != r) continue;
        fill(count, e);
        priority[count] = placement->is_consumer(e.neighbor) ? 1 : 0;
        ++count;
      }
      if (count < 2) continue;
      form_fusion_groups(std::span(live.data(), count), params.n, node_rng, groups, u, r,
                         std::span(priority.data(), count));
    }
  }

  sample_fusion_outcomes(groups, params.q, rng.fork(3));
  return {params, placement, std::move(links), std::move(groups)};
}

}  // namespace ghzperc
