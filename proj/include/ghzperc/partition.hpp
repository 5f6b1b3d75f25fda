#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghzperc/topology.hpp"

namespace ghzperc {

/// The four spatial regions of the divided-network protocol.
enum class RegionId : std::uint8_t { I = 0, II = 1, III = 2, IV = 3 };

inline constexpr std::array<RegionId, 4> kAllRegions{RegionId::I, RegionId::II, RegionId::III,
                                                     RegionId::IV};

const char* to_string(RegionId r) noexcept;
std::optional<RegionId> parse_region(std::string_view s) noexcept;
constexpr std::size_t region_index(RegionId r) noexcept { return static_cast<std::size_t>(r); }

/// Edge -> region map. Unassigned entries only appear in partitions loaded
/// from incomplete files; the validator reports them.
class RegionPartition {
 public:
  RegionPartition() = default;
  explicit RegionPartition(std::size_t edge_count) : regions_(edge_count) {}

  std::size_t edge_count() const noexcept { return regions_.size(); }
  std::optional<RegionId> region(EdgeId e) const { return regions_[e]; }
  void assign(EdgeId e, RegionId r) { regions_[e] = r; }

  /// Number of edges assigned to `r`.
  std::size_t count(RegionId r) const;

  friend bool operator==(const RegionPartition&, const RegionPartition&) = default;

 private:
  std::vector<std::optional<RegionId>> regions_;
};

enum class ViolationKind {
  EdgeCountMismatch,
  UnassignedEdge,
  ConsumerEdgeMultiplicity,
  RegionDisconnected,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::optional<RegionId> region;
  std::optional<EdgeId> edge;
  std::string detail;
};

/// Four-region division around a same-row consumer pair at distance D.
///
///   I   edges inside the tilted square (diamond) with Alice and Bob at
///       opposite vertices
///   II  remaining edges of the D-tall box above the consumers' row,
///       spanning the columns between them
///   III mirror image of II below the row
///   IV  everything else
///
/// Alice's right/up/down/left edges land in I/II/III/IV; Bob's mirrored.
/// The boxes must keep a margin of at least D to every grid boundary so the
/// outer region can route around them; otherwise Error(PartitionInfeasible).
RegionPartition generate_quadrant_partition(const NetworkTopology& topology,
                                            const ConsumerPlacement& placement);

/// Checks totality, distinct regions for each consumer's edges, and that
/// each region's edge-induced subgraph joins Alice's edge to Bob's edge.
/// Returns an empty list iff the partition is acceptable.
std::vector<Violation> validate_partition(const NetworkTopology& topology,
                                          const ConsumerPlacement& placement,
                                          const RegionPartition& partition);

/// A partition that has passed `validate_partition` for a given placement.
class ValidatedPartition {
 public:
  /// Throws Error(InvalidPartition) listing the violations.
  static ValidatedPartition create(const NetworkTopology& topology,
                                   const ConsumerPlacement& placement, RegionPartition partition);

  RegionId region(EdgeId e) const noexcept { return static_cast<RegionId>(regions_[e]); }
  const RegionPartition& partition() const noexcept { return partition_; }

 private:
  ValidatedPartition(RegionPartition p, std::vector<std::uint8_t> r)
      : partition_(std::move(p)), regions_(std::move(r)) {}

  RegionPartition partition_;
  std::vector<std::uint8_t> regions_;
};

/// CSV with header `edge_id,region`, one row per edge in edge-id order.
void write_partition_csv(std::ostream& out, const NetworkTopology& topology,
                         const RegionPartition& partition);

/// Parses the CSV written by `write_partition_csv` (rows in any order).
/// Malformed rows, unknown or duplicate edges raise Error(InvalidPartition)
/// naming the line; missing edges are left unassigned.
RegionPartition read_partition_csv(std::istream& in, const NetworkTopology& topology);

}  // namespace ghzperc
