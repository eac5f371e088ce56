#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "sidewalk/errors.hpp"
#include "sidewalk/graph.hpp"

namespace sidewalk {

/// One direction per undirected edge, with cached out-degrees. Copyable
/// value; single writer per copy. References the graph it orients.
class Orientation {
 public:
  Orientation() = default;

  /// toward_hi[e] true means edge (lo, hi) is directed lo -> hi.
  static Orientation from_bits(const Graph& g, std::vector<bool> toward_hi) {
    if (toward_hi.size() != g.edge_count())
      throw ValidationError("direction bits do not match edge count");
    Orientation o;
    o.g_ = &g;
    o.toward_hi_ = std::move(toward_hi);
    o.rebuild_out_degrees();
    return o;
  }

  /// Every edge directed from its smaller endpoint to its larger one.
  static Orientation lexicographic(const Graph& g) {
    return from_bits(g, std::vector<bool>(g.edge_count(), true));
  }

  static Orientation random(const Graph& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<bool> bits(g.edge_count());
    for (std::size_t e = 0; e < bits.size(); ++e) bits[e] = rng() & 1;
    return from_bits(g, std::move(bits));
  }

  /// Directions from Euler circuits of the graph augmented with a virtual
  /// vertex joined to every odd-degree vertex. Every real vertex ends up
  /// with out-degree at most ceil(deg/2).
  static Orientation euler_balanced(const Graph& g);

  const Graph& graph() const { return *g_; }

  Vertex tail(EdgeId e) const {
    const auto [lo, hi] = g_->edge(e);
    return toward_hi_[e] ? lo : hi;
  }
  Vertex head(EdgeId e) const {
    const auto [lo, hi] = g_->edge(e);
    return toward_hi_[e] ? hi : lo;
  }

  /// True iff edge e is directed out of x.
  bool directed_from(EdgeId e, Vertex x) const { return tail(e) == x; }

  std::uint32_t out_degree(Vertex v) const { return out_deg_[v]; }
  std::uint32_t in_degree(Vertex v) const { return g_->degree(v) - out_deg_[v]; }

  void flip_edge(EdgeId e) {
    const Vertex t = tail(e), h = head(e);
    toward_hi_[e] = !toward_hi_[e];
    --out_deg_[t];
    ++out_deg_[h];
  }

  Orientation reversed() const {
    std::vector<bool> bits(toward_hi_.size());
    for (std::size_t e = 0; e < bits.size(); ++e) bits[e] = !toward_hi_[e];
    return from_bits(*g_, std::move(bits));
  }

  /// Tail, head pairs indexed by edge id.
  std::vector<std::pair<Vertex, Vertex>> directed_pairs() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(g_->edge_count());
    for (EdgeId e = 0; e < g_->edge_count(); ++e) out.emplace_back(tail(e), head(e));
    return out;
  }

  std::size_t differing_edges(const Orientation& other) const {
    std::size_t count = 0;
    for (std::size_t e = 0; e < toward_hi_.size(); ++e)
      if (toward_hi_[e] != other.toward_hi_[e]) ++count;
    return count;
  }

  std::uint32_t max_out_degree() const {
    std::uint32_t best = 0;
    for (std::uint32_t d : out_deg_) best = std::max(best, d);
    return best;
  }

  bool operator==(const Orientation& other) const {
    return g_ == other.g_ && toward_hi_ == other.toward_hi_;
  }

 private:
  void rebuild_out_degrees() {
    out_deg_.assign(g_->vertex_count(), 0);
    for (EdgeId e = 0; e < g_->edge_count(); ++e) ++out_deg_[tail(e)];
  }

  const Graph* g_ = nullptr;
  std::vector<bool> toward_hi_;
  std::vector<std::uint32_t> out_deg_;
};

inline Orientation Orientation::euler_balanced(const Graph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();

  std::vector<Vertex> odd;
  for (Vertex v = 0; v < n; ++v)
    if (g.degree(v) % 2 == 1) odd.push_back(v);

  // Augmented adjacency: real edges keep their ids, virtual edges (to
  // vertex n) get ids m, m+1, ...
  const std::size_t n_aug = n + (odd.empty() ? 0 : 1);
  std::vector<std::vector<std::pair<Vertex, std::uint32_t>>> adj(n_aug);
  for (EdgeId e = 0; e < m; ++e) {
    const auto [u, v] = g.edge(e);
    adj[u].emplace_back(v, e);
    adj[v].emplace_back(u, e);
  }
  for (std::size_t i = 0; i < odd.size(); ++i) {
    const auto id = static_cast<std::uint32_t>(m + i);
    adj[odd[i]].emplace_back(static_cast<Vertex>(n), id);
    adj[static_cast<std::size_t>(n)].emplace_back(odd[i], id);
  }

  std::vector<bool> used(m + odd.size(), false);
  std::vector<bool> toward_hi(m, false);
  std::vector<std::size_t> cursor(n_aug, 0);
  std::vector<Vertex> stack;
  for (std::size_t s = 0; s < n_aug; ++s) {
    stack.assign(1, static_cast<Vertex>(s));
    while (!stack.empty()) {
      const Vertex v = stack.back();
      auto& cur = cursor[v];
      while (cur < adj[v].size() && used[adj[v][cur].second]) ++cur;
      if (cur == adj[v].size()) {
        stack.pop_back();
        continue;
      }
      const auto [w, id] = adj[v][cur];
      used[id] = true;
      if (id < m) toward_hi[id] = v < w;
      stack.push_back(w);
    }
  }
  return from_bits(g, std::move(toward_hi));
}

/// Vertices reachable from A by oriented paths of length at most depth.
/// Sign +1 follows edge directions, -1 follows them backwards. A itself is
/// always included.
inline VertexSet oriented_ball(const Graph& g, const Orientation& o, const VertexSet& from,
                               std::size_t depth, int sign) {
  VertexSet ball = from;
  std::vector<Vertex> frontier = from.to_vector();
  std::vector<Vertex> next;
  for (std::size_t step = 0; step < depth && !frontier.empty(); ++step) {
    next.clear();
    for (Vertex v : frontier) {
      const auto nbrs = g.neighbors(v);
      const auto eids = g.incident_edges(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const bool follows = sign >= 0 ? o.directed_from(eids[i], v) : o.directed_from(eids[i], nbrs[i]);
        if (follows && !ball.contains(nbrs[i])) {
          ball.add(nbrs[i]);
          next.push_back(nbrs[i]);
        }
      }
    }
    frontier.swap(next);
  }
  return ball;
}

}  // namespace sidewalk
