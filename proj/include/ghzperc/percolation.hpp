#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ghzperc/parallel.hpp"
#include "ghzperc/protocol.hpp"
#include "ghzperc/rng.hpp"
#include "ghzperc/topology.hpp"

namespace ghzperc {

struct SpanningEstimate {
  double probability = 0;
  double ci_low = 0;   ///< Wilson 95%
  double ci_high = 0;
  std::uint64_t trials = 0;
  std::uint64_t spanning = 0;
};

struct BoundaryPoint {
  double q;
  double p_c;
  double err;  ///< half-width: bisection tolerance / 2 plus statistical part
};

/// Critical fusion probability at a fixed link probability.
struct SiteThreshold {
  double p;
  double q_c;
  double err;
};

struct CriticalBoundary {
  int k = 1;
  double mu = kInfinity;
  int n = 4;
  std::vector<BoundaryPoint> points;  ///< sorted by q
  std::vector<double> gaps;           ///< q values without a crossing
};

/// Fraction of blocks whose qubit graph spans left to right when every node
/// acts as a repeater. Trial t uses `rng.fork(t)`, so two calls with the
/// same rng share random numbers (coupled in p and q).
SpanningEstimate estimate_spanning_probability(const NetworkTopology& topology,
                                               const ProtocolParams& params, std::uint64_t trials,
                                               const RngStream& rng, Parallelism par = {});

/// Bisection on p for the 0.5-crossing of the spanning probability, with
/// q, n, k, mu and latency taken from `params`. Stops once the bracket is at
/// most `tol` wide. Throws Error(NoCrossing) if p = 1 does not span with
/// probability 0.5.
BoundaryPoint find_critical_p(const ProtocolParams& params, const NetworkTopology& topology,
                              double tol, std::uint64_t trials_per_eval, const RngStream& rng,
                              Parallelism par = {});

/// Same as find_critical_p along the q axis at fixed p.
SiteThreshold find_critical_q(const ProtocolParams& params, const NetworkTopology& topology,
                              double tol, std::uint64_t trials_per_eval, const RngStream& rng,
                              Parallelism par = {});

/// find_critical_p for each q in `q_grid`; q values without a crossing are
/// collected in `gaps`.
CriticalBoundary trace_boundary(const ProtocolParams& params, std::span<const double> q_grid,
                                const NetworkTopology& topology, double tol,
                                std::uint64_t trials_per_eval, const RngStream& rng,
                                Parallelism par = {});

/// Spanning probability as a function of an occupation probability x,
/// built from Newman-Ziff sweeps: realization r first spans after
/// `first_spanning[r]` of `elements` elements were added (elements + 1 when
/// it never does), and P(x) averages P(Binomial(elements, x) >= that count).
struct PercolationCurve {
  std::uint64_t elements = 0;
  std::vector<std::uint64_t> first_spanning;

  double probability(double x) const;
  /// x at which probability(x) crosses `level` (bisection to 1e-7).
  double crossing(double level = 0.5) const;
};

/// Static k = 1, n >= degree lattice. Nodes are occupied (fusion succeeds)
/// with probability q, then bonds are added in random order. Spanning
/// follows the qubit-graph rule: a failed node still touches the clusters
/// of its open bonds but does not join them.
PercolationCurve newman_ziff_static(const NetworkTopology& topology, double q,
                                   std::uint64_t realizations, const RngStream& rng);

/// As newman_ziff_static with the roles swapped: bonds open with
/// probability p, nodes are occupied in random order.
PercolationCurve newman_ziff_site_static(const NetworkTopology& topology, double p,
                                        std::uint64_t realizations, const RngStream& rng);

}  // namespace ghzperc
