#include "ghzperc/entgraph.hpp"

#include <algorithm>

#include "ghzperc/error.hpp"
#include "ghzperc/union_find.hpp"

namespace ghzperc {

QubitGraph assemble_graph(const BlockOutcome& outcome, FusionEdgeStyle style, bool keep_edges) {
  const LinkBlock& links = outcome.links;
  QubitGraph g;
  g.k_ = links.k();
  g.has_edges_ = keep_edges;
  const std::size_t slots = links.qubit_slots();
  g.vertex_.assign(slots, 0);
  for (QubitIndex q = 0; q < slots; ++q) {
    if (links.alive(q)) {
      g.vertex_[q] = 1;
      ++g.vertex_count_;
    }
  }

  UnionFind dsu(slots);
  if (keep_edges) g.link_edges_.reserve(links.link_count());
  for (std::size_t l = 0; l < links.link_count(); ++l) {
    const auto a = static_cast<QubitIndex>(2 * l);
    if (links.alive(a) && links.alive(a + 1)) {
      if (keep_edges) g.link_edges_.emplace_back(a, a + 1);
      dsu.unite(a, a + 1);
    }
  }

  for (const FusionGroup& group : outcome.groups) {
    if (!group.succeeded) continue;
    const auto members = outcome.groups.members(group);
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (style == FusionEdgeStyle::Star) {
        if (keep_edges) g.fusion_edges_.emplace_back(members[0], members[i]);
        dsu.unite(members[0], members[i]);
      } else {
        for (std::size_t j = 0; j < i; ++j) {
          if (keep_edges) g.fusion_edges_.emplace_back(members[j], members[i]);
          dsu.unite(members[j], members[i]);
        }
      }
    }
  }

  g.label_.resize(slots);
  for (QubitIndex q = 0; q < slots; ++q) {
    g.label_[q] = dsu.find(q);
    if (g.vertex_[q] && g.label_[q] == q) ++g.component_count_;
  }
  return g;
}

std::vector<QubitIndex> qubits_at(const QubitGraph& graph, const NetworkTopology& topology,
                                  NodeIndex node) {
  std::vector<QubitIndex> out;
  const int k = graph.k();
  for (const auto& inc : topology.incident(node)) {
    for (int s = 1; s <= k; ++s) {
      const QubitIndex q = qubit_index(inc.edge, s, inc.side, k);
      if (graph.is_vertex(q)) out.push_back(q);
    }
  }
  return out;
}

namespace {

std::vector<QubitIndex> labels_at(const QubitGraph& graph, const NetworkTopology& topology,
                                  std::span<const NodeIndex> nodes) {
  std::vector<QubitIndex> labels;
  const int k = graph.k();
  for (NodeIndex node : nodes) {
    for (const auto& inc : topology.incident(node)) {
      for (int s = 1; s <= k; ++s) {
        const QubitIndex q = qubit_index(inc.edge, s, inc.side, k);
        if (graph.is_vertex(q)) labels.push_back(graph.component(q));
      }
    }
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

std::size_t intersection_size(const std::vector<QubitIndex>& a, const std::vector<QubitIndex>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

std::size_t count_shared_ghz(const QubitGraph& graph, const NetworkTopology& topology,
                             const ConsumerPlacement& placement) {
  const NodeIndex alice = placement.alice_index();
  const NodeIndex bob = placement.bob_index();
  return intersection_size(labels_at(graph, topology, std::span(&alice, 1)),
                           labels_at(graph, topology, std::span(&bob, 1)));
}

bool spans_left_right(const QubitGraph& graph, const NetworkTopology& topology) {
  std::vector<NodeIndex> left;
  std::vector<NodeIndex> right;
  for (int y = 0; y < topology.height(); ++y) {
    left.push_back(topology.index({0, y}));
    right.push_back(topology.index({topology.width() - 1, y}));
  }
  return intersection_size(labels_at(graph, topology, left), labels_at(graph, topology, right)) > 0;
}

std::size_t count_components_reference(const QubitGraph& graph) {
  if (!graph.has_edge_lists())
    throw Error(ErrorKind::InvalidParams, "graph was assembled without edge lists");
  const std::size_t slots = graph.qubit_slots();
  std::vector<std::uint32_t> degree(slots + 1, 0);
  auto count_edge = [&](const QubitGraph::QubitPair& e) {
    ++degree[e.first + 1];
    ++degree[e.second + 1];
  };
  for (const auto& e : graph.link_edges()) count_edge(e);
  for (const auto& e : graph.fusion_edges()) count_edge(e);
  for (std::size_t i = 1; i <= slots; ++i) degree[i] += degree[i - 1];
  std::vector<QubitIndex> adjacency(degree[slots]);
  std::vector<std::uint32_t> fill(degree.begin(), degree.end() - 1);
  auto add_edge = [&](const QubitGraph::QubitPair& e) {
    adjacency[fill[e.first]++] = e.second;
    adjacency[fill[e.second]++] = e.first;
  };
  for (const auto& e : graph.link_edges()) add_edge(e);
  for (const auto& e : graph.fusion_edges()) add_edge(e);

  std::vector<std::uint8_t> visited(slots, 0);
  std::vector<QubitIndex> stack;
  std::size_t components = 0;
  for (QubitIndex start = 0; start < slots; ++start) {
    if (!graph.is_vertex(start) || visited[start]) continue;
    ++components;
    visited[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const QubitIndex v = stack.back();
      stack.pop_back();
      for (auto i = degree[v]; i < degree[v + 1]; ++i) {
        const QubitIndex w = adjacency[i];
        if (!visited[w]) {
          visited[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return components;
}

}  // namespace ghzperc
