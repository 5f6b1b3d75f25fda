#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghzperc {

/// Grid coordinate of a repeater node: column `x`, row `y`.
struct NodeId {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

using NodeIndex = std::uint32_t;
using EdgeId = std::uint32_t;

constexpr int manhattan(NodeId a, NodeId b) noexcept {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx + dy;
}

/// Grid directions. `Up` is increasing y.
enum class Direction : std::uint8_t { Right, Up, Left, Down };

/// Undirected edge; `a` is the lexicographically smaller endpoint.
struct Edge {
  NodeIndex a;
  NodeIndex b;
};

/// One entry of a node's adjacency list. `side` is 0 when the node is the
/// edge's `a` endpoint and 1 when it is `b`.
struct Incidence {
  EdgeId edge;
  NodeIndex neighbor;
  std::uint8_t side;
};

/// Immutable network graph of repeater nodes. Nodes carry grid coordinates;
/// the adjacency itself is stored generically (CSR) so other lattices can be
/// expressed with the same type.
class NetworkTopology {
 public:
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t node_count() const noexcept { return coords_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool contains(NodeId id) const noexcept;
  NodeIndex index(NodeId id) const;
  NodeId node(NodeIndex i) const { return coords_[i]; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Incidence> incident(NodeIndex i) const noexcept {
    return {incidences_.data() + offsets_[i], incidences_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeIndex i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::size_t max_degree() const noexcept { return max_degree_; }

  std::optional<EdgeId> edge_between(NodeId u, NodeId v) const;
  std::optional<EdgeId> edge_toward(NodeId from, Direction dir) const;

  /// Canonical `x1.y1-x2.y2` label, smaller endpoint first.
  std::string edge_label(EdgeId e) const;
  std::optional<EdgeId> parse_edge_label(std::string_view label) const;

  friend NetworkTopology build_square_grid(int width, int height);

 private:
  NetworkTopology() = default;

  int width_ = 0;
  int height_ = 0;
  std::vector<NodeId> coords_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Incidence> incidences_;
  std::size_t max_degree_ = 0;
};

/// Square grid of `width` x `height` repeaters with nearest-neighbour edges.
/// Edge ids are assigned row by row: for each node, its rightward edge and
/// then its upward edge. Adjacency lists are ordered right, up, left, down.
/// Throws Error(InvalidDimension) when either dimension is below 2.
NetworkTopology build_square_grid(int width, int height);

/// Alice/Bob pair. Construct through `create`, which validates it.
class ConsumerPlacement {
 public:
  static ConsumerPlacement create(const NetworkTopology& topology, NodeId alice, NodeId bob);

  NodeId alice() const noexcept { return alice_; }
  NodeId bob() const noexcept { return bob_; }
  NodeIndex alice_index() const noexcept { return alice_index_; }
  NodeIndex bob_index() const noexcept { return bob_index_; }
  int distance() const noexcept { return manhattan(alice_, bob_); }
  bool is_consumer(NodeIndex i) const noexcept { return i == alice_index_ || i == bob_index_; }

 private:
  ConsumerPlacement(NodeId a, NodeId b, NodeIndex ai, NodeIndex bi)
      : alice_(a), bob_(b), alice_index_(ai), bob_index_(bi) {}

  NodeId alice_;
  NodeId bob_;
  NodeIndex alice_index_;
  NodeIndex bob_index_;
};

/// Same-row placement at Manhattan distance `distance` on the middle row,
/// centred horizontally so both consumers get the largest equal margin.
ConsumerPlacement centered_placement(const NetworkTopology& topology, int distance);

}  // namespace ghzperc
