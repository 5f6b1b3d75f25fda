#include "ghzperc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ghzperc/entgraph.hpp"
#include "ghzperc/error.hpp"
#include "ghzperc/stats.hpp"
#include "ghzperc/union_find.hpp"

namespace ghzperc {

namespace {

struct SpanCount {
  std::uint64_t trials = 0;
  std::uint64_t spanning = 0;
  void merge(const SpanCount& o) noexcept {
    trials += o.trials;
    spanning += o.spanning;
  }
};

enum class Axis { P, Q };

struct Crossing {
  double critical;
  double err;
};

// Bisection shared by the p and q searches. The lower end of the bracket is
// never evaluated: with p = 0 or q = 0 nothing spans on grids wider than 2.
Crossing bisect(Axis axis, const ProtocolParams& base, const NetworkTopology& topology, double tol,
                std::uint64_t trials, const RngStream& rng, Parallelism par) {
  if (!(tol > 0)) throw Error(ErrorKind::InvalidParams, "tol must be positive");
  auto eval = [&](double x) {
    ProtocolParams params = base;
    (axis == Axis::P ? params.p : params.q) = x;
    return estimate_spanning_probability(topology, params, trials, rng, par).probability;
  };
  double lo = 0.0, hi = 1.0;
  double p_lo = 0.0, p_hi = eval(1.0);
  if (p_hi < 0.5) {
    throw Error(ErrorKind::NoCrossing,
                std::string("spanning probability at ") + (axis == Axis::P ? "p" : "q") +
                    " = 1 is " + std::to_string(p_hi) + " < 0.5");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double pm = eval(mid);
    if (pm >= 0.5) {
      hi = mid;
      p_hi = pm;
    } else {
      lo = mid;
      p_lo = pm;
    }
  }
  // Statistical half-width: 95% error of a proportion near 0.5, mapped onto
  // the axis through the finite-difference slope across the final bracket.
  const double width = hi - lo;
  const double slope = (p_hi - p_lo) / width;
  const double prop_half = 1.959963984540054 * std::sqrt(0.25 / static_cast<double>(trials));
  const double stat_half = slope > 0 ? std::min(0.5, prop_half / slope) : 0.5;
  return {0.5 * (lo + hi), 0.5 * tol + stat_half};
}

}  // namespace

SpanningEstimate estimate_spanning_probability(const NetworkTopology& topology,
                                               const ProtocolParams& params, std::uint64_t trials,
                                               const RngStream& rng, Parallelism par) {
  if (trials == 0) throw Error(ErrorKind::InvalidParams, "trials must be at least 1");
  params.validate();
  const auto total = parallel_accumulate<SpanCount>(trials, par, [&](std::size_t t, SpanCount& acc) {
    const BlockOutcome outcome = run_block(topology, std::nullopt, params, rng.fork(t));
    const QubitGraph graph = assemble_graph(outcome, FusionEdgeStyle::Star, false);
    ++acc.trials;
    if (spans_left_right(graph, topology)) ++acc.spanning;
  });
  SpanningEstimate est;
  est.trials = total.trials;
  est.spanning = total.spanning;
  est.probability = static_cast<double>(total.spanning) / static_cast<double>(total.trials);
  const auto ci = stats::wilson(total.spanning, total.trials);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  return est;
}

BoundaryPoint find_critical_p(const ProtocolParams& params, const NetworkTopology& topology,
                              double tol, std::uint64_t trials_per_eval, const RngStream& rng,
                              Parallelism par) {
  const Crossing c = bisect(Axis::P, params, topology, tol, trials_per_eval, rng, par);
  return {params.q, c.critical, c.err};
}

SiteThreshold find_critical_q(const ProtocolParams& params, const NetworkTopology& topology,
                              double tol, std::uint64_t trials_per_eval, const RngStream& rng,
                              Parallelism par) {
  const Crossing c = bisect(Axis::Q, params, topology, tol, trials_per_eval, rng, par);
  return {params.p, c.critical, c.err};
}

CriticalBoundary trace_boundary(const ProtocolParams& params, std::span<const double> q_grid,
                                const NetworkTopology& topology, double tol,
                                std::uint64_t trials_per_eval, const RngStream& rng,
                                Parallelism par) {
  CriticalBoundary boundary;
  boundary.k = params.k;
  boundary.mu = params.mu;
  boundary.n = params.n;
  std::vector<double> grid(q_grid.begin(), q_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double q : grid) {
    ProtocolParams at = params;
    at.q = q;
    try {
      boundary.points.push_back(find_critical_p(at, topology, tol, trials_per_eval, rng, par));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossing) throw;
      boundary.gaps.push_back(q);
    }
  }
  return boundary;
}

double PercolationCurve::probability(double x) const {
  if (first_spanning.empty()) return 0.0;
  double total = 0.0;
  for (auto m : first_spanning) total += stats::binomial_upper_tail(elements, m, x);
  return total / static_cast<double>(first_spanning.size());
}

double PercolationCurve::crossing(double level) const {
  double lo = 0.0, hi = 1.0;
  if (probability(hi) < level) return 1.0;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (probability(mid) >= level ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

constexpr std::uint8_t kLeft = 1;
constexpr std::uint8_t kRight = 2;

std::uint8_t column_flags(const NetworkTopology& topology, NodeIndex i) {
  const int x = topology.node(i).x;
  std::uint8_t f = 0;
  if (x == 0) f |= kLeft;
  if (x == topology.width() - 1) f |= kRight;
  return f;
}

// Clusters of occupied nodes. A failed node touched by an open bond lends its
// column flags to the occupied side without joining anything.
class SpanningClusters {
 public:
  explicit SpanningClusters(const NetworkTopology& topology)
      : topology_(topology), dsu_(topology.node_count()), flags_(topology.node_count(), 0) {}

  void occupy(NodeIndex u) { flags_[u] = column_flags(topology_, u); }

  // Bond between occupied u and v (v may be unoccupied). Returns true once
  // u's cluster spans.
  bool bond(NodeIndex u, NodeIndex v, bool v_occupied) {
    if (v_occupied) {
      const auto ru = dsu_.find(u);
      const auto rv = dsu_.find(v);
      const auto merged = flags_[ru] | flags_[rv];
      const auto root = dsu_.unite(ru, rv);
      flags_[root] = static_cast<std::uint8_t>(merged);
      return merged == (kLeft | kRight);
    }
    const auto r = dsu_.find(u);
    flags_[r] |= column_flags(topology_, v);
    return flags_[r] == (kLeft | kRight);
  }

  bool spans(NodeIndex u) { return flags_[dsu_.find(u)] == (kLeft | kRight); }

 private:
  const NetworkTopology& topology_;
  UnionFind dsu_;
  std::vector<std::uint8_t> flags_;
};

// Bond joining two failed nodes: only spans when it alone crosses the grid.
bool bare_bond_spans(const NetworkTopology& topology, const Edge& e) {
  return (column_flags(topology, e.a) | column_flags(topology, e.b)) == (kLeft | kRight);
}

}  // namespace

PercolationCurve newman_ziff_static(const NetworkTopology& topology, double q,
                                   std::uint64_t realizations, const RngStream& rng) {
  if (realizations == 0) throw Error(ErrorKind::InvalidParams, "realizations must be at least 1");
  PercolationCurve curve;
  curve.elements = topology.edge_count();
  std::vector<EdgeId> order(topology.edge_count());
  std::vector<std::uint8_t> occupied(topology.node_count());
  for (std::uint64_t r = 0; r < realizations; ++r) {
    RngStream stream = rng.fork(r);
    for (auto& o : occupied) o = stream.bernoulli(q);
    std::iota(order.begin(), order.end(), EdgeId{0});
    shuffle(order.begin(), order.end(), stream);

    SpanningClusters clusters(topology);
    for (NodeIndex i = 0; i < topology.node_count(); ++i)
      if (occupied[i]) clusters.occupy(i);

    std::uint64_t first = curve.elements + 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Edge& e = topology.edge(order[i]);
      bool spans = false;
      if (occupied[e.a])
        spans = clusters.bond(e.a, e.b, occupied[e.b]);
      else if (occupied[e.b])
        spans = clusters.bond(e.b, e.a, false);
      else
        spans = bare_bond_spans(topology, e);
      if (spans) {
        first = i + 1;
        break;
      }
    }
    curve.first_spanning.push_back(first);
  }
  return curve;
}

PercolationCurve newman_ziff_site_static(const NetworkTopology& topology, double p,
                                        std::uint64_t realizations, const RngStream& rng) {
  if (realizations == 0) throw Error(ErrorKind::InvalidParams, "realizations must be at least 1");
  PercolationCurve curve;
  curve.elements = topology.node_count();
  std::vector<NodeIndex> order(topology.node_count());
  std::vector<std::uint8_t> open(topology.edge_count());
  std::vector<std::uint8_t> occupied(topology.node_count());
  for (std::uint64_t r = 0; r < realizations; ++r) {
    RngStream stream = rng.fork(r);
    for (auto& o : open) o = stream.bernoulli(p);
    std::iota(order.begin(), order.end(), NodeIndex{0});
    shuffle(order.begin(), order.end(), stream);
    std::fill(occupied.begin(), occupied.end(), 0);

    std::uint64_t first = curve.elements + 1;
    for (EdgeId e = 0; e < topology.edge_count(); ++e) {
      if (open[e] && bare_bond_spans(topology, topology.edge(e))) {
        first = 0;
        break;
      }
    }

    SpanningClusters clusters(topology);
    for (std::size_t i = 0; i < order.size() && first > curve.elements; ++i) {
      const NodeIndex u = order[i];
      occupied[u] = 1;
      clusters.occupy(u);
      bool spans = false;
      for (const auto& inc : topology.incident(u)) {
        if (!open[inc.edge]) continue;
        spans = clusters.bond(u, inc.neighbor, occupied[inc.neighbor]) || spans;
      }
      if (spans || clusters.spans(u)) first = i + 1;
    }
    curve.first_spanning.push_back(first);
  }
  return curve;
}

}  // namespace ghzperc
