#include "ghzperc/topology.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "ghzperc/error.hpp"

namespace ghzperc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::InvalidPlacement: return "InvalidPlacement";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::PartitionInfeasible: return "PartitionInfeasible";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

NetworkTopology build_square_grid(int width, int height) {
  if (width < 2 || height < 2) {
    throw Error(ErrorKind::InvalidDimension,
                "grid dimensions must be at least 2, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  NetworkTopology t;
  t.width_ = width;
  t.height_ = height;
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  t.coords_.reserve(n);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) t.coords_.push_back({x, y});

  auto at = [width](int x, int y) { return static_cast<NodeIndex>(y * width + x); };
  t.edges_.reserve(2 * n - width - height);
  // per node: slots for right, up, left, down
  std::vector<std::array<std::int64_t, 4>> slots(n, {-1, -1, -1, -1});
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) {
        const auto e = static_cast<std::int64_t>(t.edges_.size());
        t.edges_.push_back({at(x, y), at(x + 1, y)});
        slots[at(x, y)][0] = e;
        slots[at(x + 1, y)][2] = e;
      }
      if (y + 1 < height) {
        const auto e = static_cast<std::int64_t>(t.edges_.size());
        t.edges_.push_back({at(x, y), at(x, y + 1)});
        slots[at(x, y)][1] = e;
        slots[at(x, y + 1)][3] = e;
      }
    }
  }

  t.offsets_.reserve(n + 1);
  t.offsets_.push_back(0);
  t.incidences_.reserve(2 * t.edges_.size());
  for (NodeIndex i = 0; i < n; ++i) {
    for (auto e : slots[i]) {
      if (e < 0) continue;
      const Edge& edge = t.edges_[static_cast<std::size_t>(e)];
      const bool is_a = edge.a == i;
      t.incidences_.push_back({static_cast<EdgeId>(e), is_a ? edge.b : edge.a,
                               static_cast<std::uint8_t>(is_a ? 0 : 1)});
    }
    t.offsets_.push_back(static_cast<std::uint32_t>(t.incidences_.size()));
    t.max_degree_ = std::max<std::size_t>(t.max_degree_, t.offsets_[i + 1] - t.offsets_[i]);
  }
  return t;
}

bool NetworkTopology::contains(NodeId id) const noexcept {
  return id.x >= 0 && id.y >= 0 && id.x < width_ && id.y < height_;
}

NodeIndex NetworkTopology::index(NodeId id) const {
  if (!contains(id)) {
    throw Error(ErrorKind::InvalidPlacement,
                "node (" + std::to_string(id.x) + "," + std::to_string(id.y) + ") outside grid");
  }
  return static_cast<NodeIndex>(id.y * width_ + id.x);
}

std::optional<EdgeId> NetworkTopology::edge_between(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v) || manhattan(u, v) != 1) return std::nullopt;
  const NodeIndex vi = index(v);
  for (const auto& inc : incident(index(u)))
    if (inc.neighbor == vi) return inc.edge;
  return std::nullopt;
}

std::optional<EdgeId> NetworkTopology::edge_toward(NodeId from, Direction dir) const {
  NodeId to = from;
  switch (dir) {
    case Direction::Right: ++to.x; break;
    case Direction::Up: ++to.y; break;
    case Direction::Left: --to.x; break;
    case Direction::Down: --to.y; break;
  }
  return edge_between(from, to);
}

std::string NetworkTopology::edge_label(EdgeId e) const {
  const NodeId a = coords_[edges_[e].a];
  const NodeId b = coords_[edges_[e].b];
  return std::to_string(a.x) + "." + std::to_string(a.y) + "-" + std::to_string(b.x) + "." +
         std::to_string(b.y);
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<NodeId> parse_node(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  NodeId id;
  if (!parse_int(s.substr(0, dot), id.x) || !parse_int(s.substr(dot + 1), id.y)) return std::nullopt;
  return id;
}

}  // namespace

std::optional<EdgeId> NetworkTopology::parse_edge_label(std::string_view label) const {
  const auto dash = label.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  const auto u = parse_node(label.substr(0, dash));
  const auto v = parse_node(label.substr(dash + 1));
  if (!u || !v || !(*u < *v)) return std::nullopt;
  return edge_between(*u, *v);
}

ConsumerPlacement ConsumerPlacement::create(const NetworkTopology& topology, NodeId alice,
                                            NodeId bob) {
  if (!topology.contains(alice) || !topology.contains(bob))
    throw Error(ErrorKind::InvalidPlacement, "consumer outside the grid");
  if (alice == bob) throw Error(ErrorKind::InvalidPlacement, "alice and bob coincide");
  return {alice, bob, topology.index(alice), topology.index(bob)};
}

ConsumerPlacement centered_placement(const NetworkTopology& topology, int distance) {
  if (distance < 1 || distance > topology.width() - 1) {
    throw Error(ErrorKind::InvalidPlacement,
                "distance " + std::to_string(distance) + " does not fit a row of width " +
                    std::to_string(topology.width()));
  }
  const int y = topology.height() / 2;
  const int ax = (topology.width() - 1 - distance) / 2;
  return ConsumerPlacement::create(topology, {ax, y}, {ax + distance, y});
}

}  // namespace ghzperc
