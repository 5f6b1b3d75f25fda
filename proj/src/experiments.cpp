#include "ghzperc/experiments.hpp"

#include <cmath>

#include "ghzperc/entgraph.hpp"
#include "ghzperc/error.hpp"

namespace ghzperc {

RateEstimate make_rate_estimate(const stats::CountAccumulator& counts, const ProtocolParams& params,
                                int distance) {
  RateEstimate est;
  est.trials = counts.trials;
  est.params = params;
  est.distance = distance;
  est.counts = counts;
  est.mean_rate = counts.mean() / params.k;
  est.std_error = counts.stderr_of_mean() / params.k;
  return est;
}

RateEstimate estimate_rate(const NetworkTopology& topology, const ConsumerPlacement& placement,
                           const ProtocolParams& params, std::uint64_t trials, const RngStream& rng,
                           Parallelism par) {
  if (trials == 0) throw Error(ErrorKind::InvalidParams, "trials must be at least 1");
  params.validate();
  const std::optional<ConsumerPlacement> consumers = placement;
  const auto counts = parallel_accumulate<stats::CountAccumulator>(
      trials, par, [&](std::size_t t, stats::CountAccumulator& acc) {
        const BlockOutcome outcome = run_block(topology, consumers, params, rng.fork(t));
        const QubitGraph graph = assemble_graph(outcome, FusionEdgeStyle::Star, false);
        acc.add(count_shared_ghz(graph, topology, placement));
      });
  return make_rate_estimate(counts, params, placement.distance());
}

namespace {

struct RegionCounts {
  std::array<stats::CountAccumulator, 4> regions;
  stats::CountAccumulator total;
  void merge(const RegionCounts& o) noexcept {
    for (std::size_t r = 0; r < 4; ++r) regions[r].merge(o.regions[r]);
    total.merge(o.total);
  }
};

// Qubit of `node` on its single edge in region r (k = 1), if any.
std::array<std::optional<QubitIndex>, 4> consumer_qubits(const NetworkTopology& topology,
                                                         const ValidatedPartition& partition,
                                                         NodeIndex node) {
  std::array<std::optional<QubitIndex>, 4> out;
  for (const auto& inc : topology.incident(node))
    out[region_index(partition.region(inc.edge))] = qubit_index(inc.edge, 1, inc.side, 1);
  return out;
}

}  // namespace

DividedRate estimate_divided_rate(const NetworkTopology& topology,
                                  const ConsumerPlacement& placement,
                                  const ValidatedPartition& partition, const ProtocolParams& params,
                                  std::uint64_t trials, const RngStream& rng, Parallelism par) {
  if (trials == 0) throw Error(ErrorKind::InvalidParams, "trials must be at least 1");
  params.validate();
  if (params.k != 1)
    throw Error(ErrorKind::UnsupportedCombination, "network division requires k = 1");
  const auto alice = consumer_qubits(topology, partition, placement.alice_index());
  const auto bob = consumer_qubits(topology, partition, placement.bob_index());
  const std::optional<ConsumerPlacement> consumers = placement;

  const auto counts =
      parallel_accumulate<RegionCounts>(trials, par, [&](std::size_t t, RegionCounts& acc) {
        const BlockOutcome outcome = run_block(topology, consumers, params, rng.fork(t), &partition);
        const QubitGraph graph = assemble_graph(outcome, FusionEdgeStyle::Star, false);
        std::uint64_t total = 0;
        for (std::size_t r = 0; r < 4; ++r) {
          const bool shared = alice[r] && bob[r] && graph.is_vertex(*alice[r]) &&
                              graph.is_vertex(*bob[r]) &&
                              graph.component(*alice[r]) == graph.component(*bob[r]);
          acc.regions[r].add(shared ? 1 : 0);
          total += shared ? 1 : 0;
        }
        acc.total.add(total);
      });

  DividedRate out;
  for (std::size_t r = 0; r < 4; ++r)
    out.regions[r] = make_rate_estimate(counts.regions[r], params, placement.distance());
  out.total = make_rate_estimate(counts.total, params, placement.distance());
  return out;
}

DividedRate estimate_divided_rate(const NetworkTopology& topology,
                                  const ConsumerPlacement& placement,
                                  const RegionPartition& partition, const ProtocolParams& params,
                                  std::uint64_t trials, const RngStream& rng, Parallelism par) {
  const auto validated = ValidatedPartition::create(topology, placement, partition);
  return estimate_divided_rate(topology, placement, validated, params, trials, rng, par);
}

const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::P: return "p";
    case SweepAxis::Q: return "q";
    case SweepAxis::K: return "k";
    case SweepAxis::Mu: return "mu";
    case SweepAxis::Distance: return "distance";
  }
  return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view s) noexcept {
  for (auto a : {SweepAxis::P, SweepAxis::Q, SweepAxis::K, SweepAxis::Mu, SweepAxis::Distance})
    if (s == to_string(a)) return a;
  return std::nullopt;
}

namespace {

bool is_integral(double v) { return std::floor(v) == v; }

ProtocolParams params_at(const ProtocolParams& base, SweepAxis axis, double value) {
  ProtocolParams p = base;
  switch (axis) {
    case SweepAxis::P: p.p = value; break;
    case SweepAxis::Q: p.q = value; break;
    case SweepAxis::K: p.k = static_cast<int>(value); break;
    case SweepAxis::Mu: p.mu = value; break;
    case SweepAxis::Distance: break;
  }
  return p;
}

}  // namespace

void validate_sweep(const SweepConfig& config) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidConfig, why); };
  if (config.trials == 0) fail("trials must be at least 1");
  if (config.values.empty()) fail("sweep needs at least one value");
  const bool explicit_nodes = config.placement.alice.has_value() || config.placement.bob.has_value();
  if (explicit_nodes && !(config.placement.alice && config.placement.bob))
    fail("placement needs both alice and bob");
  if (explicit_nodes && config.axis == SweepAxis::Distance)
    fail("a distance sweep cannot use explicit consumer nodes");
  if (!explicit_nodes && config.axis != SweepAxis::Distance && config.placement.distances.empty())
    fail("placement needs alice/bob or at least one distance");
  if (config.axis == SweepAxis::Distance && config.placement.distances.size() > 1)
    fail("a distance sweep takes its distances from the sweep values");
  for (double v : config.values) {
    if ((config.axis == SweepAxis::K || config.axis == SweepAxis::Distance) && !is_integral(v))
      fail(std::string("sweep values for ") + to_string(config.axis) + " must be integers");
    try {
      params_at(config.base, config.axis, v).validate();
    } catch (const Error& e) {
      fail(std::string("sweep value ") + std::to_string(v) + ": " + e.what());
    }
  }
  if (config.divided) {
    if (config.axis == SweepAxis::K || config.base.k != 1)
      fail("network division supports k = 1 only");
  }
}

RateTable sweep_rate(const SweepConfig& config) {
  validate_sweep(config);
  const NetworkTopology topology = build_square_grid(config.width, config.height);
  const RngStream root(config.seed, 0);

  std::vector<int> series = config.placement.distances;
  if (config.axis == SweepAxis::Distance || config.placement.alice) series = {0};

  RateTable table;
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (std::size_t i = 0; i < config.values.size(); ++i) {
      const double value = config.values[i];
      const ProtocolParams params = params_at(config.base, config.axis, value);
      const ConsumerPlacement placement = [&] {
        if (config.placement.alice)
          return ConsumerPlacement::create(topology, *config.placement.alice, *config.placement.bob);
        const int d = config.axis == SweepAxis::Distance ? static_cast<int>(value) : series[s];
        return centered_placement(topology, d);
      }();
      const RngStream stream = root.fork(s * config.values.size() + i);

      if (!config.divided) {
        table.push_back({config.axis, value,
                         estimate_rate(topology, placement, params, config.trials, stream,
                                       config.parallelism),
                         config.width, config.height, ""});
        continue;
      }
      RegionPartition partition = config.partition
                                      ? *config.partition
                                      : generate_quadrant_partition(topology, placement);
      const auto validated = ValidatedPartition::create(topology, placement, std::move(partition));
      const DividedRate rates = estimate_divided_rate(topology, placement, validated, params,
                                                      config.trials, stream, config.parallelism);
      for (RegionId r : kAllRegions)
        table.push_back({config.axis, value, rates.regions[region_index(r)], config.width,
                         config.height, to_string(r)});
      table.push_back({config.axis, value, rates.total, config.width, config.height, "total"});
    }
  }
  return table;
}

OptimalK find_optimal_k(const NetworkTopology& topology, const ConsumerPlacement& placement,
                        const ProtocolParams& params, int k_max, std::uint64_t trials,
                        const RngStream& rng, Parallelism par) {
  if (k_max < 1) throw Error(ErrorKind::InvalidParams, "k_max must be at least 1");
  OptimalK out;
  double best = -1.0;
  for (int k = 1; k <= k_max; ++k) {
    ProtocolParams at = params;
    at.k = k;
    RateEstimate est = estimate_rate(topology, placement, at, trials,
                                     rng.fork(static_cast<std::uint64_t>(k)), par);
    if (est.mean_rate > best) {
      best = est.mean_rate;
      out.k_star = k;
    }
    out.table.push_back({SweepAxis::K, static_cast<double>(k), std::move(est), topology.width(),
                         topology.height(), ""});
  }
  return out;
}

}  // namespace ghzperc
