#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sidewalk/errors.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/orientation.hpp"
#include "sidewalk/rational.hpp"
#include "sidewalk/solver.hpp"

namespace sidewalk {

inline constexpr std::size_t kDefaultChainBudget = 10'000'000;

/// Simple paths of length 1..max_len, stored flat in canonical form (first
/// vertex smaller than last), listed in lexicographic order, with a proper
/// greedy coloring of their intersection graph (paths sharing a vertex get
/// distinct colors).
class ChainPool {
 public:
  std::size_t max_len = 0;
  std::vector<std::uint64_t> offsets{0};
  std::vector<Vertex> flat_vertices;
  std::vector<EdgeId> flat_edges;
  std::vector<std::uint32_t> color;
  std::uint32_t color_count = 0;

  std::size_t size() const { return color.size(); }

  std::span<const Vertex> path(std::size_t p) const {
    return {flat_vertices.data() + offsets[p], flat_vertices.data() + offsets[p + 1]};
  }

  /// Edge ids between consecutive path vertices.
  std::span<const EdgeId> path_edges(std::size_t p) const {
    return {flat_edges.data() + offsets[p] - p, flat_edges.data() + offsets[p + 1] - (p + 1)};
  }
};

namespace detail {

/// DFS all simple paths from each start, ascending; record() sees the
/// current vertex sequence whenever its canonical (front < back).
template <typename Record>
void enumerate_simple_paths(const Graph& g, std::size_t max_len, std::span<const Vertex> starts,
                            Record&& record) {
  std::vector<Vertex> path_vertices;
  std::vector<EdgeId> path_edges;
  std::vector<bool> on_path(g.vertex_count(), false);

  struct Frame {
    Vertex vertex;
    std::size_t next_index;
  };
  std::vector<Frame> stack;

  for (Vertex s : starts) {
    path_vertices.assign(1, s);
    path_edges.clear();
    on_path[s] = true;
    stack.assign(1, {s, 0});
    while (!stack.empty()) {
      Frame& frame = stack.back();
      const auto nbrs = g.neighbors(frame.vertex);
      const auto eids = g.incident_edges(frame.vertex);
      std::size_t i = frame.next_index;
      while (i < nbrs.size() && on_path[nbrs[i]]) ++i;
      if (i >= nbrs.size() || path_edges.size() >= max_len) {
        on_path[frame.vertex] = false;
        path_vertices.pop_back();
        if (!path_edges.empty()) path_edges.pop_back();
        stack.pop_back();
        continue;
      }
      frame.next_index = i + 1;
      const Vertex w = nbrs[i];
      path_vertices.push_back(w);
      path_edges.push_back(eids[i]);
      on_path[w] = true;
      if (path_vertices.front() < path_vertices.back()) record(path_vertices, path_edges);
      stack.push_back({w, 0});
    }
  }
}

/// Greedy coloring in listed order via per-vertex bitsets of used colors.
inline void color_pool(ChainPool& pool, std::size_t vertex_count) {
  std::vector<std::vector<std::uint64_t>> used(vertex_count);
  std::vector<std::uint64_t> merged;
  pool.color.resize(pool.size());
  std::uint32_t max_color = 0;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const auto verts = pool.path(p);
    merged.clear();
    for (Vertex v : verts) {
      const auto& bits = used[v];
      if (bits.size() > merged.size()) merged.resize(bits.size(), 0);
      for (std::size_t w = 0; w < bits.size(); ++w) merged[w] |= bits[w];
    }
    std::uint32_t c = 0;
    for (std::size_t w = 0;; ++w) {
      if (w >= merged.size()) {
        c = static_cast<std::uint32_t>(w * 64);
        break;
      }
      if (~merged[w]) {
        c = static_cast<std::uint32_t>(w * 64 + __builtin_ctzll(~merged[w]));
        break;
      }
    }
    pool.color[p] = c;
    max_color = std::max(max_color, c);
    const std::size_t word = c / 64;
    for (Vertex v : verts) {
      if (used[v].size() <= word) used[v].resize(word + 1, 0);
      used[v][word] |= 1ull << (c % 64);
    }
  }
  pool.color_count = pool.size() ? max_color + 1 : 0;
}

}  // namespace detail

/// All simple paths of length 1..n. Throws BudgetError beyond the path
/// budget (counts grow like n * Delta^n).
inline ChainPool build_chain_pool(const Graph& g, std::size_t n,
                                  std::size_t budget = kDefaultChainBudget) {
  if (n < 1) throw ValidationError("chain pool needs max length >= 1");
  ChainPool pool;
  pool.max_len = n;
  std::vector<Vertex> starts(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) starts[v] = v;
  detail::enumerate_simple_paths(
      g, n, starts, [&](const std::vector<Vertex>& verts, const std::vector<EdgeId>& edges) {
        if (pool.offsets.size() > budget)
          throw BudgetError("chain pool for length " + std::to_string(n) + " exceeds budget of " +
                            std::to_string(budget) + " paths");
        pool.flat_vertices.insert(pool.flat_vertices.end(), verts.begin(), verts.end());
        pool.flat_edges.insert(pool.flat_edges.end(), edges.begin(), edges.end());
        pool.offsets.push_back(pool.flat_vertices.size());
      });
  pool.color.resize(pool.offsets.size() - 1);
  detail::color_pool(pool, g.vertex_count());
  return pool;
}

/// Simple paths of length 1..n with one endpoint in over and the other in
/// under. During a stage every vertex with out-degree <= k stays <= k and
/// every one with >= k stays >= k, so chain heads live in the stage-start
/// over set and tails in the stage-start under set; this pool therefore
/// carries every chain the full pool could ever flip.
inline ChainPool build_restricted_chain_pool(const Graph& g, std::size_t n, const VertexSet& over,
                                             const VertexSet& under,
                                             std::size_t budget = kDefaultChainBudget) {
  if (n < 1) throw ValidationError("chain pool needs max length >= 1");
  ChainPool pool;
  pool.max_len = n;
  std::vector<Vertex> starts;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (over.contains(v) || under.contains(v)) starts.push_back(v);
  detail::enumerate_simple_paths(
      g, n, starts, [&](const std::vector<Vertex>& verts, const std::vector<EdgeId>& edges) {
        const Vertex a = verts.front(), b = verts.back();
        const bool endpoints_ok = (over.contains(a) && under.contains(b)) ||
                                  (under.contains(a) && over.contains(b));
        if (!endpoints_ok) return;
        if (pool.offsets.size() > budget)
          throw BudgetError("chain pool for length " + std::to_string(n) + " exceeds budget of " +
                            std::to_string(budget) + " paths");
        pool.flat_vertices.insert(pool.flat_vertices.end(), verts.begin(), verts.end());
        pool.flat_edges.insert(pool.flat_edges.end(), edges.begin(), edges.end());
        pool.offsets.push_back(pool.flat_vertices.size());
      });
  pool.color.resize(pool.offsets.size() - 1);
  detail::color_pool(pool, g.vertex_count());
  return pool;
}

/// O = {out > k}, I = {out < k}.
inline std::pair<VertexSet, VertexSet> over_under_sets(const Graph& g, const Orientation& o,
                                                       std::uint32_t k) {
  VertexSet over(g.vertex_count()), under(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (o.out_degree(v) > k)
      over.add(v);
    else if (o.out_degree(v) < k)
      under.add(v);
  }
  return {std::move(over), std::move(under)};
}

/// True iff the sequence read left to right is an augmenting chain: every
/// consecutive pair oriented forward, out(first) > k, out(last) < k.
inline bool is_augmenting_chain(const Graph& g, const Orientation& o, std::uint32_t k,
                                std::span<const Vertex> path) {
  if (path.size() < 2) throw ValidationError("chain needs at least one edge");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto e = g.edge_id(std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1]));
    if (!e) throw ValidationError("chain vertices " + std::to_string(path[i]) + " and " +
                                  std::to_string(path[i + 1]) + " are not adjacent");
    if (!o.directed_from(*e, path[i])) return false;
  }
  return o.out_degree(path.front()) > k && o.out_degree(path.back()) < k;
}

inline void flip_chain_in_place(const Graph& g, Orientation& o, std::span<const Vertex> path) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto e = g.edge_id(std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1]));
    o.flip_edge(*e);
  }
}

/// Reverse every edge along the path. The first endpoint loses one unit of
/// out-degree, the last gains one, nothing else changes.
inline Orientation flip_chain(const Graph& g, const Orientation& o, std::span<const Vertex> path) {
  if (path.size() < 2) throw ValidationError("chain needs at least one edge");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto e = g.edge_id(std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1]));
    if (!e) throw ValidationError("chain vertices " + std::to_string(path[i]) + " and " +
                                  std::to_string(path[i + 1]) + " are not adjacent");
    if (!o.directed_from(*e, path[i]))
      throw ValidationError("chain edge " + std::to_string(path[i]) + " -> " +
                            std::to_string(path[i + 1]) + " not oriented forward");
  }
  Orientation flipped = o;
  flip_chain_in_place(g, flipped, path);
  return flipped;
}

/// Length of the shortest augmenting chain (BFS from the over set along
/// oriented edges until the under set is hit); nullopt when none exists.
inline std::optional<std::uint64_t> shortest_augmenting_chain_length(const Graph& g,
                                                                     const Orientation& o,
                                                                     std::uint32_t k) {
  std::vector<std::uint64_t> dist(g.vertex_count(), ~0ull);
  std::queue<Vertex> queue;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (o.out_degree(v) > k) {
      dist[v] = 0;
      queue.push(v);
    }
  }
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop();
    const auto nbrs = g.neighbors(v);
    const auto eids = g.incident_edges(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (dist[nbrs[i]] != ~0ull || !o.directed_from(eids[i], v)) continue;
      dist[nbrs[i]] = dist[v] + 1;
      if (o.out_degree(nbrs[i]) < k) return dist[nbrs[i]];
      queue.push(nbrs[i]);
    }
  }
  return std::nullopt;
}

/// One record per scheduler round that flipped something, plus one summary
/// per stage with color = -1.
struct TraceRow {
  std::uint32_t stage = 0;
  std::int64_t color = -1;
  std::uint64_t flips = 0;
  Rational mu_O;
  Rational mu_I;
  Rational flipped_measure;
  std::optional<std::uint64_t> min_chain;
};

struct StageMetrics {
  std::uint32_t n = 0;
  Rational mu_O_start, mu_I_start;
  Rational mu_O_end, mu_I_end;
  Rational flipped_measure;
  std::uint64_t flips = 0;
  std::size_t pool_size = 0;
  std::uint32_t color_count = 0;
  std::optional<std::uint64_t> min_chain_end;
  std::vector<TraceRow> rows;
};

struct DynamicsTrace {
  std::vector<TraceRow> rows;
  std::vector<StageMetrics> stages;
  std::uint32_t k = 0;
  Rational rho;
  std::optional<Rational> alpha;
  bool hypothesis_ok = true;
  bool truncated = false;
  std::uint32_t truncated_stage = 0;
  std::string truncation_reason;
};

/// Round-robin color schedule; every color recurs unboundedly, position is
/// a function of the round counter.
struct Schedule {
  std::uint32_t color_count = 0;
  std::uint64_t round = 0;

  std::uint32_t next() { return static_cast<std::uint32_t>(round++ % color_count); }
};

/// One stage of augmenting-chain flipping: enumerate chains of length at
/// most n between the stage-start over and under sets, color them, then
/// sweep color classes round-robin flipping every augmenting chain, until a
/// full cycle of colors flips nothing. Afterwards no augmenting chain of
/// length <= n exists at all, and the measure of edges whose direction
/// changed is at most 2 n Delta rho^n min(mu(O), mu(I)).
inline std::pair<Orientation, StageMetrics> run_lemma_augment(
    const Graph& g, const VertexMeasure& mu, const Orientation& start, std::uint32_t k,
    std::size_t n, std::size_t budget = kDefaultChainBudget) {
  Orientation o = start;
  StageMetrics metrics;
  metrics.n = static_cast<std::uint32_t>(n);

  auto [over, under] = over_under_sets(g, o, k);
  Rational mu_over = mu.mass(over);
  Rational mu_under = mu.mass(under);
  metrics.mu_O_start = mu_over;
  metrics.mu_I_start = mu_under;

  if (!over.empty() && !under.empty()) {
    const ChainPool pool = build_restricted_chain_pool(g, n, over, under, budget);
    metrics.pool_size = pool.size();
    metrics.color_count = pool.color_count;

    std::vector<std::vector<std::uint32_t>> by_color(pool.color_count);
    for (std::size_t p = 0; p < pool.size(); ++p) by_color[pool.color[p]].push_back(p);

    std::vector<bool> edge_flipped(g.edge_count(), false);
    Rational flipped_measure = 0;

    const auto flip_path = [&](std::size_t p, bool forward) {
      const auto verts = pool.path(p);
      const auto edges = pool.path_edges(p);
      for (EdgeId e : edges) {
        o.flip_edge(e);
        const auto [eu, ev] = g.edge(e);
        const Rational w = mu.weight(eu) + mu.weight(ev);
        if (edge_flipped[e]) {
          edge_flipped[e] = false;
          flipped_measure -= w;
        } else {
          edge_flipped[e] = true;
          flipped_measure += w;
        }
      }
      const Vertex head = forward ? verts.front() : verts.back();
      const Vertex tail = forward ? verts.back() : verts.front();
      if (o.out_degree(head) == k) {
        over.remove(head);
        mu_over -= mu.weight(head);
      }
      if (o.out_degree(tail) == k) {
        under.remove(tail);
        mu_under -= mu.weight(tail);
      }
    };

    const auto augmenting = [&](std::size_t p, bool forward) {
      const auto verts = pool.path(p);
      const auto edges = pool.path_edges(p);
      const Vertex head = forward ? verts.front() : verts.back();
      const Vertex tail = forward ? verts.back() : verts.front();
      if (o.out_degree(head) <= k || o.out_degree(tail) >= k) return false;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const Vertex from = forward ? verts[i] : verts[verts.size() - 1 - i];
        if (!o.directed_from(edges[forward ? i : edges.size() - 1 - i], from)) return false;
      }
      return true;
    };

    if (pool.color_count > 0) {
      Schedule schedule{pool.color_count, 0};
      std::uint32_t quiet_rounds = 0;
      while (quiet_rounds < pool.color_count) {
        const std::uint32_t c = schedule.next();
        std::uint64_t round_flips = 0;
        for (std::uint32_t p : by_color[c]) {
          if (augmenting(p, true))
            flip_path(p, true);
          else if (augmenting(p, false))
            flip_path(p, false);
          else
            continue;
          ++round_flips;
        }
        if (round_flips == 0) {
          ++quiet_rounds;
          continue;
        }
        quiet_rounds = 0;
        metrics.flips += round_flips;
        TraceRow row;
        row.stage = metrics.n;
        row.color = static_cast<std::int64_t>(c);
        row.flips = round_flips;
        row.mu_O = mu_over;
        row.mu_I = mu_under;
        row.flipped_measure = flipped_measure;
        row.min_chain = shortest_augmenting_chain_length(g, o, k);
        metrics.rows.push_back(std::move(row));
      }
    }
    metrics.flipped_measure = flipped_measure;
  }

  metrics.mu_O_end = mu_over;
  metrics.mu_I_end = mu_under;
  metrics.min_chain_end = shortest_augmenting_chain_length(g, o, k);

  TraceRow summary;
  summary.stage = metrics.n;
  summary.color = -1;
  summary.flips = metrics.flips;
  summary.mu_O = metrics.mu_O_end;
  summary.mu_I = metrics.mu_I_end;
  summary.flipped_measure = metrics.flipped_measure;
  summary.min_chain = metrics.min_chain_end;
  metrics.rows.push_back(std::move(summary));

  return {std::move(o), std::move(metrics)};
}

namespace detail {

inline void note_hypothesis(const Graph& g, const VertexMeasure& mu, std::uint32_t k,
                            DynamicsTrace& trace) {
  trace.rho = cocycle_bound(g, mu);
  try {
    trace.alpha = max_density_subgraph(g, mu).density;
    trace.hypothesis_ok = Rational(static_cast<long>(k)) > trace.rho * trace.rho * *trace.alpha;
  } catch (const UnsupportedSizeError&) {
    trace.alpha.reset();
    trace.hypothesis_ok = true;
  }
}

}  // namespace detail

/// Staged iteration of the flipping pass: stage i bans chains of length
/// <= i. The trace records every flipping round plus stage summaries;
/// hitting the chain budget truncates the run and is recorded, not skipped.
inline std::pair<Orientation, DynamicsTrace> run_theorem_dynamics(
    const Graph& g, const VertexMeasure& mu, const Orientation& initial, std::uint32_t k,
    std::uint32_t stages, std::size_t budget = kDefaultChainBudget) {
  Orientation o = initial;
  DynamicsTrace trace;
  trace.k = k;
  detail::note_hypothesis(g, mu, k, trace);

  for (std::uint32_t n = 1; n <= stages; ++n) {
    try {
      auto [next, metrics] = run_lemma_augment(g, mu, o, k, n, budget);
      o = std::move(next);
      trace.rows.insert(trace.rows.end(), metrics.rows.begin(), metrics.rows.end());
      trace.stages.push_back(std::move(metrics));
    } catch (const BudgetError& err) {
      trace.truncated = true;
      trace.truncated_stage = n;
      trace.truncation_reason = err.what();
      break;
    }
  }
  return {std::move(o), std::move(trace)};
}

struct ExpansiveResult {
  Orientation orientation;
  DynamicsTrace trace;
  bool used_reversal = false;
  std::uint64_t finisher_flips = 0;
};

/// Expansive mode for d-regular graphs at k = ceil(d/2) under the uniform
/// measure: run the staged dynamics, keep whichever of o, o^-1 has the
/// smaller over-full set, then clear the remaining over-full vertices with
/// sequential shortest-chain flips (the same chain mechanism, one chain at
/// a time). On a finite graph this lands on an exact ceil(d/2)-orientation.
inline ExpansiveResult run_expansive_dynamics(const Graph& g, const Orientation& initial,
                                              std::uint32_t stages,
                                              std::size_t budget = kDefaultChainBudget) {
  const auto d = g.regular_degree();
  if (!d) throw ValidationError("expansive mode needs a regular graph");
  const std::uint32_t k = (*d + 1) / 2;
  const VertexMeasure mu = VertexMeasure::uniform(g.vertex_count());

  ExpansiveResult result;
  auto [o, trace] = run_theorem_dynamics(g, mu, initial, k, stages, budget);
  result.trace = std::move(trace);

  const Orientation rev = o.reversed();
  std::size_t over_o = 0, over_rev = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (o.out_degree(v) > k) ++over_o;
    if (rev.out_degree(v) > k) ++over_rev;
  }
  result.used_reversal = over_rev < over_o;
  Orientation chosen = result.used_reversal ? rev : o;

  const AugmentOutcome finish_outcome = augment_until_bounded(g, chosen, k);
  if (!finish_outcome.feasible)
    throw ValidationError("finisher could not reach the target out-degree bound");
  result.finisher_flips = finish_outcome.flips;

  TraceRow finish;
  finish.stage = stages + 1;
  finish.color = -1;
  finish.flips = result.finisher_flips;
  const auto [over_end, under_end] = over_under_sets(g, chosen, k);
  finish.mu_O = mu.mass(over_end);
  finish.mu_I = mu.mass(under_end);
  finish.flipped_measure = 0;
  finish.min_chain = shortest_augmenting_chain_length(g, chosen, k);
  result.trace.rows.push_back(finish);

  result.orientation = std::move(chosen);
  return result;
}

/// Ball-growth check behind the terminal envelope: when every vertex of A
/// has out-degree >= k, mu(B+(A)) >= (k / (rho alpha)) mu(A).
struct Claim1Result {
  bool holds = false;
  Rational lhs;
  Rational rhs;
};

inline Claim1Result verify_claim1(const Graph& g, const VertexMeasure& mu, const Orientation& o,
                                  std::uint32_t k, const VertexSet& a) {
  bool premise = true;
  a.for_each([&](Vertex v) {
    if (o.out_degree(v) < k) premise = false;
  });
  if (!premise) throw ValidationError("claim 1 premise fails: some vertex of A has out-degree < k");

  const Rational alpha = max_density_subgraph(g, mu).density;
  const Rational rho = cocycle_bound(g, mu);
  Claim1Result r;
  r.lhs = mu.mass(oriented_ball(g, o, a, 1, +1));
  r.rhs = Rational(static_cast<long>(k)) / (rho * alpha) * mu.mass(a);
  r.holds = r.lhs >= r.rhs;
  return r;
}

}  // namespace sidewalk
