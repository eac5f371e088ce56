#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "sidewalk/errors.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/maxflow.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/orientation.hpp"
#include "sidewalk/rational.hpp"

namespace sidewalk {

/// Nonempty subset witnessing the maximum of cost(G|A). For uniform weights
/// vertex_mass is |A| and density is the plain edge density e(A)/|A|; in
/// general vertex_mass is mu(A) and density is
/// sum_{x in A} w(x)|G_x cap A| / (2 mu(A)).
struct DensityCertificate {
  VertexSet subset;
  std::size_t edge_count = 0;
  Rational vertex_mass;
  Rational density;
};

/// Edge classes partitioning the edge set; every class is a sidewalk.
struct SidewalkCover {
  std::vector<std::vector<EdgeId>> classes;
};

/// Result of k_orient: an orientation with max out-degree <= k, or a vertex
/// set R with e(R) > k|R| certifying infeasibility.
struct KOrientResult {
  bool feasible = false;
  Orientation orientation;
  VertexSet witness;
};

namespace detail {

class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n), size_(n, 1), edges_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void add_edge(std::size_t u, std::size_t v) {
    std::size_t ru = find(u), rv = find(v);
    if (ru == rv) {
      ++edges_[ru];
      return;
    }
    if (size_[ru] < size_[rv]) std::swap(ru, rv);
    parent_[rv] = ru;
    size_[ru] += size_[rv];
    edges_[ru] += edges_[rv] + 1;
  }

  std::size_t component_size(std::size_t root) const { return size_[root]; }
  std::size_t component_edges(std::size_t root) const { return edges_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> edges_;
};

}  // namespace detail

/// True iff every connected component has at most one cycle, i.e. edge
/// count <= vertex count in every component.
inline bool is_sidewalk(const Graph& g) {
  detail::Dsu dsu(g.vertex_count());
  for (const auto& [u, v] : g.edges()) dsu.add_edge(u, v);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const std::size_t r = dsu.find(v);
    if (dsu.component_edges(r) > dsu.component_size(r)) return false;
  }
  return true;
}

/// Sidewalk check for the spanning subgraph with the given edge subset.
inline bool edge_class_is_sidewalk(const Graph& g, const std::vector<EdgeId>& edges) {
  detail::Dsu dsu(g.vertex_count());
  for (EdgeId e : edges) {
    const auto [u, v] = g.edge(e);
    dsu.add_edge(u, v);
  }
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const std::size_t r = dsu.find(v);
    if (dsu.component_edges(r) > dsu.component_size(r)) return false;
  }
  return true;
}

struct AugmentOutcome {
  bool feasible = false;
  std::uint64_t flips = 0;
  VertexSet witness;
};

/// Repeatedly reverse a shortest oriented path from an over-full vertex
/// (out > k) to an under-full one (out < k) until no vertex is over-full.
/// BFS visits sources and neighbors in ascending vertex order, so the
/// result is deterministic. If no under-full vertex is reachable, the
/// reachable set R keeps all its out-edges inside itself, so
/// e(R) >= k|R| + 1 and R certifies infeasibility.
inline AugmentOutcome augment_until_bounded(const Graph& g, Orientation& o, std::uint32_t k) {
  const std::size_t n = g.vertex_count();
  AugmentOutcome outcome;

  std::vector<EdgeId> parent_edge(n);
  std::vector<Vertex> parent(n);
  std::vector<bool> seen(n);
  std::vector<bool> is_source(n);

  for (;;) {
    seen.assign(n, false);
    is_source.assign(n, false);
    std::queue<Vertex> queue;
    for (Vertex v = 0; v < n; ++v) {
      if (o.out_degree(v) > k) {
        seen[v] = true;
        is_source[v] = true;
        queue.push(v);
      }
    }
    if (queue.empty()) {
      outcome.feasible = true;
      return outcome;
    }

    std::optional<Vertex> target;
    while (!queue.empty() && !target) {
      const Vertex v = queue.front();
      queue.pop();
      const auto nbrs = g.neighbors(v);
      const auto eids = g.incident_edges(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const Vertex w = nbrs[i];
        if (seen[w] || !o.directed_from(eids[i], v)) continue;
        seen[w] = true;
        parent[w] = v;
        parent_edge[w] = eids[i];
        if (o.out_degree(w) < k) {
          target = w;
          break;
        }
        queue.push(w);
      }
    }

    if (!target) {
      outcome.feasible = false;
      outcome.witness = VertexSet(n);
      for (Vertex v = 0; v < n; ++v)
        if (seen[v]) outcome.witness.add(v);
      return outcome;
    }

    for (Vertex v = *target; !is_source[v]; v = parent[v]) o.flip_edge(parent_edge[v]);
    ++outcome.flips;
  }
}

/// Try to orient with max out-degree <= k, starting from the Euler-balanced
/// orientation and reversing augmenting paths.
inline KOrientResult k_orient(const Graph& g, std::uint32_t k) {
  KOrientResult result;
  Orientation o = Orientation::euler_balanced(g);
  AugmentOutcome outcome = augment_until_bounded(g, o, k);
  result.feasible = outcome.feasible;
  if (outcome.feasible)
    result.orientation = std::move(o);
  else
    result.witness = std::move(outcome.witness);
  return result;
}

/// Smallest k for which k_orient succeeds, with a witness orientation.
/// Binary search over [0, degree bound].
inline std::pair<std::uint32_t, Orientation> orientation_number(const Graph& g) {
  std::uint32_t lo = 0, hi = g.degree_bound();
  Orientation witness = k_orient(g, hi).orientation;
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    KOrientResult r = k_orient(g, mid);
    if (r.feasible) {
      hi = mid;
      witness = std::move(r.orientation);
    } else {
      lo = mid + 1;
    }
  }
  return {lo, std::move(witness)};
}

namespace detail {

inline std::size_t induced_edge_count(const Graph& g, const VertexSet& s) {
  std::size_t count = 0;
  for (const auto& [u, v] : g.edges())
    if (s.contains(u) && s.contains(v)) ++count;
  return count;
}

/// cost(G|A) = sum_{x in A} w(x)|G_x cap A| / (2 mu(A)).
inline Rational subset_cost(const Graph& g, const VertexMeasure& mu, const VertexSet& s) {
  Rational interior = 0;
  s.for_each([&](Vertex x) {
    std::size_t inside = 0;
    for (Vertex y : g.neighbors(x))
      if (s.contains(y)) ++inside;
    interior += mu.weight(x) * Rational(static_cast<long>(inside));
  });
  return interior / (2 * mu.mass(s));
}

inline DensityCertificate certificate_for(const Graph& g, const VertexMeasure& mu,
                                          VertexSet subset, bool uniform) {
  DensityCertificate cert;
  cert.edge_count = induced_edge_count(g, subset);
  if (uniform) {
    cert.vertex_mass = Rational(static_cast<long>(subset.size()));
    cert.density = Rational(static_cast<long>(cert.edge_count)) / cert.vertex_mass;
  } else {
    cert.vertex_mass = mu.mass(subset);
    cert.density = subset_cost(g, mu, subset);
  }
  cert.subset = std::move(subset);
  return cert;
}

/// Does some nonempty S have e(S) - lambda |S| > 0? Goldberg's network:
/// source->v capacity m, v->sink capacity m + 2 lambda - deg(v), both
/// directions capacity 1 inside; all scaled by the denominator of lambda.
/// The min cut equals mnq + 2 min_S (q e(S)... returns the source side when
/// the best S is nonempty.
inline std::optional<VertexSet> denser_subset(const Graph& g, const Rational& lambda) {
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();
  const std::int64_t p = static_cast<std::int64_t>(mpz_get_si(lambda.get_num().get_mpz_t()));
  const std::int64_t q = static_cast<std::int64_t>(mpz_get_si(lambda.get_den().get_mpz_t()));

  MaxFlow net(n + 2);
  const std::size_t source = n, sink = n + 1;
  const std::int64_t mq = static_cast<std::int64_t>(m) * q;
  for (Vertex v = 0; v < n; ++v) {
    net.add_edge(source, v, mq);
    net.add_edge(v, sink, mq + 2 * p - q * static_cast<std::int64_t>(g.degree(v)));
  }
  for (const auto& [u, v] : g.edges()) {
    net.add_edge(u, v, q);
    net.add_edge(v, u, q);
  }
  const std::int64_t cut = net.max_flow(source, sink);
  if (cut >= static_cast<std::int64_t>(m) * static_cast<std::int64_t>(n) * q) return std::nullopt;

  const std::vector<bool> side = net.min_cut_source_side(source);
  VertexSet s(n);
  for (Vertex v = 0; v < n; ++v)
    if (side[v]) s.add(v);
  return s;
}

inline DensityCertificate max_density_uniform(const Graph& g, const VertexMeasure& mu) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw ValidationError("empty graph has no nonempty subsets");
  if (g.edge_count() == 0) {
    VertexSet s(n);
    s.add(0);
    return certificate_for(g, mu, std::move(s), true);
  }

  VertexSet best = VertexSet::full(n);
  Rational lambda = Rational(static_cast<long>(g.edge_count())) / Rational(static_cast<long>(n));
  for (;;) {
    const auto improved = denser_subset(g, lambda);
    if (!improved) break;
    const std::size_t e = induced_edge_count(g, *improved);
    best = *improved;
    lambda = Rational(static_cast<long>(e)) / Rational(static_cast<long>(best.size()));
  }
  return certificate_for(g, mu, std::move(best), true);
}

}  // namespace detail

/// Exact maximizer of cost(G|A) over nonempty A. Uniform weights use
/// parametric min-cut; non-uniform weights use the d/2 closed form on
/// regular graphs and exact subset enumeration otherwise (n <= 20).
inline DensityCertificate max_density_subgraph(const Graph& g, const VertexMeasure& mu) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw ValidationError("empty graph has no nonempty subsets");
  if (mu.vertex_count() != n) throw ValidationError("measure size does not match graph");

  if (mu.is_uniform()) return detail::max_density_uniform(g, mu);

  if (g.regular_degree().has_value()) {
    // On a d-regular graph cost(G|A) <= d/2 for every A and every measure,
    // with equality at A = V.
    return detail::certificate_for(g, mu, VertexSet::full(n), false);
  }

  if (n > 20)
    throw UnsupportedSizeError("weighted max density needs n <= 20 for exact enumeration, got n = " +
                               std::to_string(n));

  VertexSet best(n);
  Rational best_cost = -1;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    VertexSet s(n);
    for (std::size_t v = 0; v < n; ++v)
      if (mask & (1u << v)) s.add(static_cast<Vertex>(v));
    const Rational cost = detail::subset_cost(g, mu, s);
    if (cost > best_cost) {
      best_cost = cost;
      best = std::move(s);
    }
  }
  return detail::certificate_for(g, mu, std::move(best), false);
}

/// max over S of ceil(e(S) / rho(S)) with rho(S) = |S| - #acyclic components
/// of G|S. Exact enumeration for n <= 20; equals the ceiling of the maximum
/// edge density, which is used beyond that size.
inline std::int64_t edmonds_bound(const Graph& g) {
  if (g.edge_count() == 0) throw ValidationError("bound needs at least one edge");
  const std::size_t n = g.vertex_count();

  if (n <= 20) {
    std::int64_t best = 0;
    std::vector<Vertex> members;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      members.clear();
      for (std::size_t v = 0; v < n; ++v)
        if (mask & (1u << v)) members.push_back(static_cast<Vertex>(v));

      detail::Dsu dsu(n);
      std::size_t edge_count = 0;
      for (const auto& [u, v] : g.edges()) {
        if ((mask & (1u << u)) && (mask & (1u << v))) {
          dsu.add_edge(u, v);
          ++edge_count;
        }
      }
      if (edge_count == 0) continue;

      std::size_t acyclic = 0;
      for (Vertex v : members) {
        if (dsu.find(v) != v) continue;
        const std::size_t size = dsu.component_size(v);
        const std::size_t edges = dsu.component_edges(v);
        if (edges == size - 1) ++acyclic;
      }
      const std::size_t rho = members.size() - acyclic;
      const auto value = static_cast<std::int64_t>((edge_count + rho - 1) / rho);
      best = std::max(best, value);
    }
    return best;
  }

  const DensityCertificate cert = detail::max_density_uniform(g, VertexMeasure::uniform(n));
  return ceil_to_int(cert.density);
}

/// Assign the i-th out-edge of each vertex (in edge-id order) to class i.
/// Each class has out-degree <= 1 everywhere, so it is a functional graph
/// and in particular a sidewalk.
inline SidewalkCover sidewalk_cover(const Graph& g, const Orientation& o, std::uint32_t k) {
  if (o.max_out_degree() > k)
    throw ValidationError("orientation has out-degree " + std::to_string(o.max_out_degree()) +
                          " above the requested bound " + std::to_string(k));
  SidewalkCover cover;
  cover.classes.assign(k, {});
  std::vector<std::uint32_t> used(g.vertex_count(), 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Vertex t = o.tail(e);
    cover.classes[used[t]++].push_back(e);
  }
  return cover;
}

/// ceil(2 alpha / (1 + rho)); with uniform weights this is ceil(alpha),
/// a lower bound for the orientation number.
inline std::int64_t cost_lower_bound(const Graph& g, const VertexMeasure& mu) {
  const Rational alpha = max_density_subgraph(g, mu).density;
  const Rational rho = cocycle_bound(g, mu);
  return ceil_to_int(2 * alpha / (1 + rho));
}

namespace detail {

inline bool orientable_below(const Graph& g, std::uint32_t k, std::size_t index,
                             std::vector<std::uint32_t>& out) {
  if (index == g.edge_count()) return true;
  const auto [u, v] = g.edge(static_cast<EdgeId>(index));
  if (out[u] < k) {
    ++out[u];
    if (orientable_below(g, k, index + 1, out)) return true;
    --out[u];
  }
  if (out[v] < k) {
    ++out[v];
    if (orientable_below(g, k, index + 1, out)) return true;
    --out[v];
  }
  return false;
}

}  // namespace detail

/// Independent oracle: smallest max out-degree over all single-direction
/// orientations, by backtracking over edge directions.
inline std::uint32_t brute_force_orientation_number(const Graph& g) {
  if (g.edge_count() > 22)
    throw UnsupportedSizeError("brute force limited to 22 edges, got " +
                               std::to_string(g.edge_count()));
  for (std::uint32_t k = 0;; ++k) {
    std::vector<std::uint32_t> out(g.vertex_count(), 0);
    if (detail::orientable_below(g, k, 0, out)) return k;
  }
}

}  // namespace sidewalk
