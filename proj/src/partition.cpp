#include "ghzperc/partition.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "ghzperc/error.hpp"

namespace ghzperc {

const char* to_string(RegionId r) noexcept {
  switch (r) {
    case RegionId::I: return "I";
    case RegionId::II: return "II";
    case RegionId::III: return "III";
    case RegionId::IV: return "IV";
  }
  return "?";
}

std::optional<RegionId> parse_region(std::string_view s) noexcept {
  for (auto r : kAllRegions)
    if (s == to_string(r)) return r;
  return std::nullopt;
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::EdgeCountMismatch: return "EdgeCountMismatch";
    case ViolationKind::UnassignedEdge: return "UnassignedEdge";
    case ViolationKind::ConsumerEdgeMultiplicity: return "ConsumerEdgeMultiplicity";
    case ViolationKind::RegionDisconnected: return "RegionDisconnected";
  }
  return "?";
}

std::size_t RegionPartition::count(RegionId r) const {
  return static_cast<std::size_t>(
      std::count(regions_.begin(), regions_.end(), std::optional<RegionId>(r)));
}

RegionPartition generate_quadrant_partition(const NetworkTopology& topology,
                                            const ConsumerPlacement& placement) {
  const NodeId a = placement.alice();
  const NodeId b = placement.bob();
  if (a.y != b.y)
    throw Error(ErrorKind::PartitionInfeasible, "consumers must share a row");

  const int west = std::min(a.x, b.x);
  const int east = std::max(a.x, b.x);
  const int row = a.y;
  const int d = east - west;
  // Regions I-III cover x in [west - d/2, east + d/2] and y in row +- 3d/2;
  // region IV keeps a margin of ceil(d/2) around them.
  const int margin = (d + 1) / 2;
  if (2 * west < d + 2 * margin || 2 * (topology.width() - 1 - east) < d + 2 * margin ||
      2 * row < 3 * d + 2 * margin || 2 * (topology.height() - 1 - row) < 3 * d + 2 * margin) {
    throw Error(ErrorKind::PartitionInfeasible,
                "consumers at distance " + std::to_string(d) + " need " +
                    std::to_string(d / 2 + margin) + " free columns beside them and " +
                    std::to_string((3 * d) / 2 + margin) + " free rows above and below");
  }

  // Tilted coordinates from the west consumer: region I is the square
  // 0 <= u, v <= d with the consumers at opposite corners. Doubled edge
  // midpoints never sit on a region border.
  auto u2 = [&](NodeId p, NodeId q) { return (p.x + q.x - 2 * west) + (p.y + q.y - 2 * row); };
  auto v2 = [&](NodeId p, NodeId q) { return (p.x + q.x - 2 * west) - (p.y + q.y - 2 * row); };
  const int s = 2 * d;

  RegionPartition partition(topology.edge_count());
  for (EdgeId e = 0; e < topology.edge_count(); ++e) {
    const NodeId u = topology.node(topology.edge(e).a);
    const NodeId v = topology.node(topology.edge(e).b);
    const int eu = u2(u, v);
    const int ev = v2(u, v);
    RegionId r = RegionId::IV;
    if (eu > 0 && eu < s && ev > 0 && ev < s)
      r = RegionId::I;
    else if (eu > 0 && eu < 2 * s && ev > -s && ev < s)
      r = RegionId::II;  // three copies of I above it
    else if (eu > -s && eu < s && ev > 0 && ev < 2 * s)
      r = RegionId::III;
    partition.assign(e, r);
  }
  return partition;
}

namespace {

// BFS from `from` over the edges of region `r`.
bool region_connects(const NetworkTopology& topology, const RegionPartition& partition,
                     RegionId r, NodeIndex from, NodeIndex to) {
  std::vector<std::uint8_t> seen(topology.node_count(), 0);
  std::queue<NodeIndex> frontier;
  frontier.push(from);
  seen[from] = 1;
  while (!frontier.empty()) {
    const NodeIndex u = frontier.front();
    frontier.pop();
    if (u == to) return true;
    for (const auto& inc : topology.incident(u)) {
      if (partition.region(inc.edge) != r || seen[inc.neighbor]) continue;
      seen[inc.neighbor] = 1;
      frontier.push(inc.neighbor);
    }
  }
  return false;
}

}  // namespace

std::vector<Violation> validate_partition(const NetworkTopology& topology,
                                          const ConsumerPlacement& placement,
                                          const RegionPartition& partition) {
  std::vector<Violation> out;
  if (partition.edge_count() != topology.edge_count()) {
    out.push_back({ViolationKind::EdgeCountMismatch, std::nullopt, std::nullopt,
                   "partition covers " + std::to_string(partition.edge_count()) +
                       " edges, topology has " + std::to_string(topology.edge_count())});
    return out;
  }
  for (EdgeId e = 0; e < topology.edge_count(); ++e) {
    if (!partition.region(e)) {
      out.push_back({ViolationKind::UnassignedEdge, std::nullopt, e,
                     "edge " + topology.edge_label(e) + " has no region"});
    }
  }

  struct ConsumerEdges {
    std::array<std::vector<EdgeId>, 4> by_region;
  };
  auto collect = [&](NodeIndex node) {
    ConsumerEdges ce;
    for (const auto& inc : topology.incident(node))
      if (auto r = partition.region(inc.edge)) ce.by_region[region_index(*r)].push_back(inc.edge);
    return ce;
  };
  const ConsumerEdges alice = collect(placement.alice_index());
  const ConsumerEdges bob = collect(placement.bob_index());

  bool multiplicity_ok = true;
  for (auto r : kAllRegions) {
    for (const auto* who : {&alice, &bob}) {
      const auto& edges = who->by_region[region_index(r)];
      if (edges.size() > 1) {
        multiplicity_ok = false;
        out.push_back({ViolationKind::ConsumerEdgeMultiplicity, r, edges[1],
                       std::string(who == &alice ? "alice" : "bob") + " has " +
                           std::to_string(edges.size()) + " edges in region " + to_string(r)});
      }
    }
  }
  if (!multiplicity_ok) return out;

  for (auto r : kAllRegions) {
    const auto& ae = alice.by_region[region_index(r)];
    const auto& be = bob.by_region[region_index(r)];
    if (ae.empty() && be.empty()) continue;
    if (ae.empty() || be.empty()) {
      out.push_back({ViolationKind::RegionDisconnected, r, ae.empty() ? be[0] : ae[0],
                     std::string("region ") + to_string(r) + " holds an edge of only " +
                         (ae.empty() ? "bob" : "alice")});
      continue;
    }
    if (!region_connects(topology, partition, r, placement.alice_index(), placement.bob_index())) {
      out.push_back({ViolationKind::RegionDisconnected, r, ae[0],
                     std::string("region ") + to_string(r) + " does not join " +
                         topology.edge_label(ae[0]) + " to " + topology.edge_label(be[0])});
    }
  }
  return out;
}

ValidatedPartition ValidatedPartition::create(const NetworkTopology& topology,
                                              const ConsumerPlacement& placement,
                                              RegionPartition partition) {
  const auto violations = validate_partition(topology, placement, partition);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << violations.size() << " violation(s)";
    for (std::size_t i = 0; i < violations.size() && i < 5; ++i)
      msg << "; " << to_string(violations[i].kind) << ": " << violations[i].detail;
    throw Error(ErrorKind::InvalidPartition, msg.str());
  }
  std::vector<std::uint8_t> regions(partition.edge_count());
  for (EdgeId e = 0; e < partition.edge_count(); ++e)
    regions[e] = static_cast<std::uint8_t>(*partition.region(e));
  return {std::move(partition), std::move(regions)};
}

void write_partition_csv(std::ostream& out, const NetworkTopology& topology,
                         const RegionPartition& partition) {
  out << "edge_id,region\n";
  for (EdgeId e = 0; e < partition.edge_count(); ++e) {
    const auto r = partition.region(e);
    out << topology.edge_label(e) << ',' << (r ? to_string(*r) : "") << '\n';
  }
}

RegionPartition read_partition_csv(std::istream& in, const NetworkTopology& topology) {
  RegionPartition partition(topology.edge_count());
  std::vector<std::uint8_t> seen(topology.edge_count(), 0);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::InvalidPartition,
                "partition file line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "edge_id,region") fail("expected header 'edge_id,region'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'edge_id,region'");
    const std::string_view label(line.data(), comma);
    const std::string_view region(line.data() + comma + 1, line.size() - comma - 1);
    const auto e = topology.parse_edge_label(label);
    if (!e) fail("unknown edge '" + std::string(label) + "'");
    const auto r = parse_region(region);
    if (!r) fail("unknown region '" + std::string(region) + "'");
    if (seen[*e]) fail("duplicate edge '" + std::string(label) + "'");
    seen[*e] = 1;
    partition.assign(*e, *r);
  }
  if (line_no == 0) fail("empty file");
  return partition;
}

}  // namespace ghzperc
