#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "sidewalk/dynamics.hpp"
#include "sidewalk/errors.hpp"
#include "sidewalk/generators.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/orientation.hpp"
#include "sidewalk/solver.hpp"

using namespace sidewalk;

namespace {

Graph triangle() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

Graph random_graph(std::size_t n, std::uint64_t seed, int percent = 50) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng() % 100 < static_cast<std::uint64_t>(percent)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

bool pool_coloring_proper(const Graph& g, const ChainPool& pool) {
  for (std::size_t p = 0; p < pool.size(); ++p)
    for (std::size_t q = p + 1; q < pool.size(); ++q) {
      if (pool.color[p] != pool.color[q]) continue;
      for (Vertex a : pool.path(p))
        for (Vertex b : pool.path(q))
          if (a == b) return false;
    }
  return true;
}

std::uint64_t total_out(const Graph& g, const Orientation& o) {
  std::uint64_t sum = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) sum += o.out_degree(v);
  return sum;
}

}  // namespace

TEST_CASE("triangle pool at length one has three mutually touching paths") {
  const Graph g = triangle();
  const ChainPool pool = build_chain_pool(g, 1);
  CHECK(pool.size() == 3);
  CHECK(pool.color_count == 3);
  CHECK(pool_coloring_proper(g, pool));
}

TEST_CASE("three vertex path pool at length two") {
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
  const ChainPool pool = build_chain_pool(g, 2);
  CHECK(pool.size() == 3);
  CHECK(pool.color_count == 3);
}

TEST_CASE("single edge pool is one path one color") {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  const ChainPool pool = build_chain_pool(g, 3);
  CHECK(pool.size() == 1);
  CHECK(pool.color_count == 1);
}

TEST_CASE("pool entries are simple adjacent vertex sequences") {
  const Graph g = random_graph(8, 21, 60);
  const ChainPool pool = build_chain_pool(g, 3);
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const auto path = pool.path(p);
    REQUIRE(path.size() >= 2);
    CHECK(path.front() < path.back());
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      CHECK(g.adjacent(path[i], path[i + 1]));
      for (std::size_t j = i + 1; j < path.size(); ++j) CHECK(path[i] != path[j]);
    }
  }
  CHECK(pool_coloring_proper(g, pool));
}

TEST_CASE("pool budget overflow names the count") {
  const Graph g = random_graph(10, 2, 90);
  CHECK_THROWS_AS(build_chain_pool(g, 6, 50), BudgetError);
  try {
    build_chain_pool(g, 6, 50);
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
  }
}

TEST_CASE("over and under threshold sets") {
  const Graph c4 = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const Orientation around = Orientation::from_bits(c4, {true, true, true, false});
  const auto [over_c, under_c] = over_under_sets(c4, around, 1);
  CHECK(over_c.empty());
  CHECK(under_c.empty());

  const Graph star = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  const Orientation out = Orientation::from_bits(star, {true, true, true});
  const auto [over_s, under_s] = over_under_sets(star, out, 1);
  CHECK(over_s.to_vector() == std::vector<Vertex>{0});
  CHECK(under_s.to_vector() == std::vector<Vertex>{1, 2, 3});

  const auto [over_top, under_top] = over_under_sets(star, out, star.degree_bound());
  CHECK(over_top.empty());
}

TEST_CASE("augmenting chain recognition") {
  // 0 -> 1 -> 2 plus 0 -> 3, so out degrees are (2, 1, 0, 0).
  const Graph g = Graph::from_edges(4, {{0, 1}, {0, 3}, {1, 2}});
  const Orientation o = Orientation::from_bits(g, {true, true, true});
  const std::vector<Vertex> chain{0, 1, 2};
  CHECK(is_augmenting_chain(g, o, 1, chain));
  CHECK_FALSE(is_augmenting_chain(g, o, 2, chain));
  const std::vector<Vertex> backwards{2, 1, 0};
  CHECK_FALSE(is_augmenting_chain(g, o, 1, backwards));
  const std::vector<Vertex> single{0, 3};
  CHECK(is_augmenting_chain(g, o, 1, single));
  const std::vector<Vertex> full_tail{1, 2};
  CHECK_FALSE(is_augmenting_chain(g, o, 1, full_tail));
  CHECK_THROWS_AS(is_augmenting_chain(g, o, 1, std::vector<Vertex>{0}), ValidationError);
  CHECK_THROWS_AS(is_augmenting_chain(g, o, 1, std::vector<Vertex>{0, 2}), ValidationError);
}

TEST_CASE("flip chain shifts out degree between the endpoints") {
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
  const Orientation o = Orientation::from_bits(g, {true, true});
  const std::vector<Vertex> chain{0, 1, 2};
  const Orientation f = flip_chain(g, o, chain);
  CHECK(f.out_degree(0) == o.out_degree(0) - 1);
  CHECK(f.out_degree(2) == o.out_degree(2) + 1);
  CHECK(f.out_degree(1) == o.out_degree(1));
  const std::vector<Vertex> back{2, 1, 0};
  CHECK(flip_chain(g, f, back) == o);
  CHECK_THROWS_AS(flip_chain(g, f, chain), ValidationError);
}

TEST_CASE("flips conserve the total out degree") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = random_graph(9, rng(), 55);
    if (g.edge_count() == 0) continue;
    Orientation o = Orientation::random(g, rng());
    for (int step = 0; step < 20; ++step) {
      // Walk forward along oriented edges to build a short chain.
      std::vector<Vertex> path{static_cast<Vertex>(rng() % 9)};
      std::vector<bool> used(9, false);
      used[path[0]] = true;
      for (int hop = 0; hop < 3; ++hop) {
        const Vertex v = path.back();
        std::vector<Vertex> nexts;
        const auto nbrs = g.neighbors(v);
        const auto eids = g.incident_edges(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i)
          if (o.directed_from(eids[i], v) && !used[nbrs[i]]) nexts.push_back(nbrs[i]);
        if (nexts.empty()) break;
        const Vertex next = nexts[rng() % nexts.size()];
        path.push_back(next);
        used[next] = true;
      }
      if (path.size() < 2) continue;
      flip_chain_in_place(g, o, path);
      CHECK(total_out(g, o) == g.edge_count());
    }
  }
}

TEST_CASE("shortest augmenting chain searches") {
  const Graph g = Graph::from_edges(4, {{0, 1}, {0, 3}, {1, 2}});
  const Orientation o = Orientation::from_bits(g, {true, true, true});
  CHECK(shortest_augmenting_chain_length(g, o, 1) == 1);
  CHECK_FALSE(shortest_augmenting_chain_length(g, o, 2).has_value());

  const Graph dense = random_graph(8, 9, 70);
  const auto [number, best] = orientation_number(dense);
  CHECK_FALSE(shortest_augmenting_chain_length(dense, best, number).has_value());
}

TEST_CASE("stage with empty over set does nothing") {
  const Graph c4 = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const Orientation around = Orientation::from_bits(c4, {true, true, true, false});
  const auto [next, metrics] = run_lemma_augment(c4, VertexMeasure::uniform(4), around, 1, 2);
  CHECK(next == around);
  CHECK(metrics.flips == 0);
  CHECK(metrics.flipped_measure == rat(0));
}

TEST_CASE("star at threshold two resolves with one flip") {
  const Graph star = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  const Orientation out = Orientation::from_bits(star, {true, true, true});
  const auto [next, metrics] = run_lemma_augment(star, VertexMeasure::uniform(4), out, 2, 1);
  CHECK(metrics.flips == 1);
  CHECK(next.max_out_degree() == 2);
  CHECK(metrics.mu_O_end == rat(0));
}

TEST_CASE("no short augmenting chain survives a stage") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    const Graph g = random_graph(9, rng(), 60);
    if (g.edge_count() == 0) continue;
    const Orientation start = Orientation::random(g, rng());
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 3);
    const std::size_t n = 1 + rng() % 3;
    const auto [next, metrics] = run_lemma_augment(g, VertexMeasure::uniform(9), start, k, n);
    const auto len = shortest_augmenting_chain_length(g, next, k);
    CHECK((!len || *len > n));
    CHECK(metrics.min_chain_end == len);
  }
}

TEST_CASE("stages never move a vertex across the threshold from the wrong side") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 25; ++trial) {
    const Graph g = random_graph(10, rng(), 55);
    if (g.edge_count() == 0) continue;
    const Orientation start = Orientation::random(g, rng());
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 3);
    const auto [next, metrics] = run_lemma_augment(g, VertexMeasure::uniform(10), start, k, 2);
    for (Vertex v = 0; v < 10; ++v) {
      if (start.out_degree(v) <= k) CHECK(next.out_degree(v) <= k);
      if (start.out_degree(v) >= k) CHECK(next.out_degree(v) >= k);
    }
  }
}

TEST_CASE("stage flip measure respects the chain bound") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(9, rng(), 60);
    if (g.edge_count() == 0) continue;
    const VertexMeasure mu = VertexMeasure::uniform(9);
    const Orientation start = Orientation::random(g, rng());
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 2);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto [next, metrics] = run_lemma_augment(g, mu, start, k, n);
      const Rational cap = rat(2) * rat(static_cast<long>(n)) *
                           rat(static_cast<long>(g.degree_bound())) *
                           std::min(metrics.mu_O_start, metrics.mu_I_start);
      CHECK(metrics.flipped_measure <= cap);
    }
  }
}

TEST_CASE("dynamics with a generous threshold stops immediately") {
  const Graph g = random_graph(8, 111, 60);
  const Orientation init = Orientation::random(g, 4);
  const auto [o, trace] =
      run_theorem_dynamics(g, VertexMeasure::uniform(8), init, g.degree_bound(), 3);
  CHECK(o == init);
  for (const auto& stage : trace.stages) CHECK(stage.flips == 0);
  CHECK(trace.stages.size() == 3);
}

TEST_CASE("torus dynamics pushes the over set to empty") {
  const Graph g = gen_torus({4, 4});
  const VertexMeasure mu = VertexMeasure::uniform(16);
  const Orientation init = Orientation::random(g, 8);
  const auto [o, trace] = run_theorem_dynamics(g, mu, init, 3, 8);
  CHECK_FALSE(trace.truncated);
  CHECK(trace.hypothesis_ok);
  REQUIRE(trace.alpha.has_value());
  CHECK(*trace.alpha == rat(2));
  CHECK(trace.rho == rat(1));
  CHECK(o.max_out_degree() <= 3);
  const auto& last = trace.stages.back();
  CHECK(last.mu_O_end == rat(0));
}

TEST_CASE("dynamics traces are deterministic") {
  const Graph g = gen_torus({3, 4});
  const VertexMeasure mu = VertexMeasure::uniform(12);
  const Orientation init = Orientation::random(g, 5);
  const auto [o1, t1] = run_theorem_dynamics(g, mu, init, 2, 5);
  const auto [o2, t2] = run_theorem_dynamics(g, mu, init, 2, 5);
  CHECK(o1 == o2);
  REQUIRE(t1.rows.size() == t2.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i].stage == t2.rows[i].stage);
    CHECK(t1.rows[i].color == t2.rows[i].color);
    CHECK(t1.rows[i].flips == t2.rows[i].flips);
    CHECK(t1.rows[i].mu_O == t2.rows[i].mu_O);
    CHECK(t1.rows[i].flipped_measure == t2.rows[i].flipped_measure);
    CHECK(t1.rows[i].min_chain == t2.rows[i].min_chain);
  }
}

TEST_CASE("reversal mirrors the whole trace at the half degree threshold") {
  const Graph g = gen_torus({4, 4});
  const VertexMeasure mu = VertexMeasure::uniform(16);
  const Orientation init = Orientation::random(g, 13);
  const std::uint32_t k = 2;
  const auto [oa, ta] = run_theorem_dynamics(g, mu, init, k, 4);
  const auto [ob, tb] = run_theorem_dynamics(g, mu, init.reversed(), k, 4);
  CHECK(oa == ob.reversed());
  REQUIRE(ta.rows.size() == tb.rows.size());
  for (std::size_t i = 0; i < ta.rows.size(); ++i) {
    CHECK(ta.rows[i].flips == tb.rows[i].flips);
    CHECK(ta.rows[i].mu_O == tb.rows[i].mu_I);
    CHECK(ta.rows[i].mu_I == tb.rows[i].mu_O);
    CHECK(ta.rows[i].flipped_measure == tb.rows[i].flipped_measure);
    CHECK(ta.rows[i].min_chain == tb.rows[i].min_chain);
  }
}

TEST_CASE("truncation is reported when the pool budget is tiny") {
  const Graph star = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  const Orientation out = Orientation::from_bits(star, {true, true, true});
  const auto [o, trace] = run_theorem_dynamics(star, VertexMeasure::uniform(4), out, 2, 3, 2);
  CHECK(trace.truncated);
  CHECK(trace.truncated_stage == 1);
  CHECK_FALSE(trace.truncation_reason.empty());
  CHECK(trace.stages.empty());
}

TEST_CASE("claim one ratio holds for over sets sampled mid run") {
  std::mt19937_64 rng(90210);
  for (int trial = 0; trial < 15; ++trial) {
    const Graph g = random_graph(9, rng(), 65);
    if (g.edge_count() == 0) continue;
    const VertexMeasure mu = VertexMeasure::uniform(9);
    Orientation o = Orientation::random(g, rng());
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 2);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto [over, under] = over_under_sets(g, o, k);
      if (!over.empty()) {
        const Claim1Result r = verify_claim1(g, mu, o, k, over);
        CHECK(r.holds);
      }
      o = run_lemma_augment(g, mu, o, k, n).first;
    }
  }
}

TEST_CASE("claim one on a directed cycle singleton") {
  const Graph c6 = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
  const Orientation around = Orientation::from_bits(c6, {true, true, true, true, true, false});
  VertexSet a(6);
  a.add(2);
  const Claim1Result r = verify_claim1(c6, VertexMeasure::uniform(6), around, 1, a);
  CHECK(r.holds);
  CHECK(r.lhs == rat(2, 6));
  CHECK(r.rhs == rat(1, 6));
}

TEST_CASE("claim one rejects sets violating the premise") {
  const Graph star = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  const Orientation out = Orientation::from_bits(star, {true, true, true});
  CHECK_THROWS_AS(verify_claim1(star, VertexMeasure::uniform(4), out, 1, VertexSet::full(4)),
                  ValidationError);
}

TEST_CASE("expansive mode orients an even cycle exactly") {
  const Graph c8 = gen_cycle(8);
  const ExpansiveResult r = run_expansive_dynamics(c8, Orientation::random(c8, 3), 4);
  CHECK(r.orientation.max_out_degree() == 1);
}

TEST_CASE("expansive mode reaches half degree on a small regular graph") {
  const Graph g = gen_random_regular(60, 6, 2);
  const ExpansiveResult r = run_expansive_dynamics(g, Orientation::random(g, 11), 3);
  CHECK(r.orientation.max_out_degree() == 3);
  CHECK_FALSE(r.trace.truncated);
}

TEST_CASE("expansive mode rejects irregular graphs") {
  const Graph star = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK_THROWS_AS(run_expansive_dynamics(star, Orientation::lexicographic(star), 2),
                  ValidationError);
}

TEST_CASE("round robin schedule cycles every color") {
  Schedule s{3, 0};
  std::vector<std::uint32_t> seen;
  for (int i = 0; i < 7; ++i) seen.push_back(s.next());
  CHECK(seen == std::vector<std::uint32_t>{0, 1, 2, 0, 1, 2, 0});
}
