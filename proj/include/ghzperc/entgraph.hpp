#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ghzperc/protocol.hpp"
#include "ghzperc/topology.hpp"

namespace ghzperc {

enum class FusionEdgeStyle {
  Star,    ///< first member joined to every other member
  Clique,  ///< every pair of members joined
};

/// Qubit-level connectivity of one block outcome. Vertices are the alive
/// qubits; edges are links with both qubits alive plus fusion edges inside
/// successful groups.
class QubitGraph {
 public:
  using QubitPair = std::pair<QubitIndex, QubitIndex>;

  int k() const noexcept { return k_; }
  std::size_t qubit_slots() const noexcept { return vertex_.size(); }
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  bool is_vertex(QubitIndex q) const noexcept { return vertex_[q] != 0; }

  std::span<const QubitPair> link_edges() const noexcept { return link_edges_; }
  std::span<const QubitPair> fusion_edges() const noexcept { return fusion_edges_; }

  /// Representative of the component holding `q` (meaningful for vertices).
  QubitIndex component(QubitIndex q) const noexcept { return label_[q]; }
  std::size_t component_count() const noexcept { return component_count_; }

  /// False when assembled without edge lists (connectivity only).
  bool has_edge_lists() const noexcept { return has_edges_; }

  friend QubitGraph assemble_graph(const BlockOutcome& outcome, FusionEdgeStyle style,
                                   bool keep_edges);

 private:
  int k_ = 1;
  std::vector<std::uint8_t> vertex_;
  std::vector<QubitPair> link_edges_;
  std::vector<QubitPair> fusion_edges_;
  std::vector<QubitIndex> label_;
  std::size_t vertex_count_ = 0;
  std::size_t component_count_ = 0;
  bool has_edges_ = true;
};

/// Builds the graph of `outcome`. With `keep_edges` false only vertices and
/// component labels are kept, which is all the rate and spanning queries need.
QubitGraph assemble_graph(const BlockOutcome& outcome,
                          FusionEdgeStyle style = FusionEdgeStyle::Star, bool keep_edges = true);

/// Number of components holding at least one Alice qubit and one Bob qubit.
std::size_t count_shared_ghz(const QubitGraph& graph, const NetworkTopology& topology,
                             const ConsumerPlacement& placement);

/// Alive qubits held at `node`.
std::vector<QubitIndex> qubits_at(const QubitGraph& graph, const NetworkTopology& topology,
                                  NodeIndex node);

/// True iff one component holds a qubit at a column-0 node and a qubit at a
/// column-(width-1) node.
bool spans_left_right(const QubitGraph& graph, const NetworkTopology& topology);

/// Component count by explicit depth-first traversal of the stored edges.
/// Independent of the disjoint-set labels; used as a cross-check. Requires
/// edge lists.
std::size_t count_components_reference(const QubitGraph& graph);

}  // namespace ghzperc
