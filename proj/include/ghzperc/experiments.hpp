#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghzperc/parallel.hpp"
#include "ghzperc/partition.hpp"
#include "ghzperc/protocol.hpp"
#include "ghzperc/rng.hpp"
#include "ghzperc/stats.hpp"
#include "ghzperc/topology.hpp"

namespace ghzperc {

/// Mean shared GHZ states per time slot over independent blocks.
struct RateEstimate {
  double mean_rate = 0;  ///< sum of per-block counts / (trials * k)
  double std_error = 0;  ///< sample sd of per-block rate / sqrt(trials)
  std::uint64_t trials = 0;
  ProtocolParams params;
  int distance = 0;
  stats::CountAccumulator counts;  ///< raw per-block shared counts
};

RateEstimate make_rate_estimate(const stats::CountAccumulator& counts, const ProtocolParams& params,
                                int distance);

/// Runs `trials` blocks; block t uses `rng.fork(t)`.
RateEstimate estimate_rate(const NetworkTopology& topology, const ConsumerPlacement& placement,
                           const ProtocolParams& params, std::uint64_t trials, const RngStream& rng,
                           Parallelism par = {});

/// Per-region and total rates of the divided network (k = 1). Each region
/// contributes 0 or 1 shared state per block.
struct DividedRate {
  std::array<RateEstimate, 4> regions;
  RateEstimate total;
};

DividedRate estimate_divided_rate(const NetworkTopology& topology,
                                  const ConsumerPlacement& placement,
                                  const ValidatedPartition& partition, const ProtocolParams& params,
                                  std::uint64_t trials, const RngStream& rng, Parallelism par = {});

/// Validates `partition` first; throws Error(InvalidPartition).
DividedRate estimate_divided_rate(const NetworkTopology& topology,
                                  const ConsumerPlacement& placement,
                                  const RegionPartition& partition, const ProtocolParams& params,
                                  std::uint64_t trials, const RngStream& rng, Parallelism par = {});

enum class SweepAxis { P, Q, K, Mu, Distance };

const char* to_string(SweepAxis axis) noexcept;
std::optional<SweepAxis> parse_sweep_axis(std::string_view s) noexcept;

/// Where the consumers sit: explicit nodes, or same-row centred at each of
/// `distances` (one series per distance).
struct PlacementSpec {
  std::optional<NodeId> alice;
  std::optional<NodeId> bob;
  std::vector<int> distances;
};

struct SweepConfig {
  int width = 100;
  int height = 100;
  PlacementSpec placement;
  ProtocolParams base;
  SweepAxis axis = SweepAxis::P;
  std::vector<double> values;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool divided = false;
  std::optional<RegionPartition> partition;  ///< generated when divided and absent
  Parallelism parallelism;
};

struct RateRow {
  SweepAxis axis;
  double axis_value;
  RateEstimate estimate;
  int width;
  int height;
  std::string region;  ///< empty, or I/II/III/IV/total for divided runs
};

using RateTable = std::vector<RateRow>;

/// Throws Error(InvalidConfig) when the config is unusable.
void validate_sweep(const SweepConfig& config);

/// One estimate per (series, axis value). Series s and value i draw from
/// RngStream(seed, 0).fork(s * values.size() + i); deterministic for a seed.
RateTable sweep_rate(const SweepConfig& config);

struct OptimalK {
  int k_star = 1;
  RateTable table;
};

/// Rate for k = 1..k_max (k uses rng.fork(k)); k_star is the argmax with
/// ties going to the smaller k.
OptimalK find_optimal_k(const NetworkTopology& topology, const ConsumerPlacement& placement,
                        const ProtocolParams& params, int k_max, std::uint64_t trials,
                        const RngStream& rng, Parallelism par = {});

}  // namespace ghzperc
