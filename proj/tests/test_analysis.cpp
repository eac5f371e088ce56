#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "sidewalk/analysis.hpp"
#include "sidewalk/dynamics.hpp"
#include "sidewalk/generators.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/orientation.hpp"

using namespace sidewalk;

namespace {

Graph k4() { return Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

Graph random_graph(std::size_t n, std::uint64_t seed, int percent = 50) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng() % 100 < static_cast<std::uint64_t>(percent)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

// Exhaustive oracle for the expansion constant: minimize the normalized
// weighted edge boundary over all sets of measure at most one half.
std::optional<Rational> oracle_expansion(const Graph& g, const VertexMeasure& mu) {
  const std::size_t n = g.vertex_count();
  REQUIRE(n <= 16);
  std::optional<Rational> best;
  for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
    Rational mass = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (mask >> v & 1) mass += mu.weight(static_cast<Vertex>(v));
    if (mass > rat(1, 2)) continue;
    Rational boundary = 0;
    for (const auto& [u, v] : g.edges()) {
      const bool inu = mask >> u & 1, inv = mask >> v & 1;
      if (inu && !inv) boundary += mu.weight(u);
      if (inv && !inu) boundary += mu.weight(v);
    }
    const Rational ratio = boundary / mass;
    if (!best || ratio < *best) best = ratio;
  }
  return best;
}

}  // namespace

TEST_CASE("expansion of the complete graph matches the subset oracle") {
  const Graph g = k4();
  const VertexMeasure mu = VertexMeasure::uniform(4);
  const auto oracle = oracle_expansion(g, mu);
  REQUIRE(oracle.has_value());
  CHECK(*oracle == rat(2));
  const ExpansionEstimate est = expansion_constant(g, mu);
  REQUIRE(est.exact.has_value());
  CHECK(*est.exact == *oracle);
  REQUIRE(est.witness.has_value());
  CHECK(mu.mass(*est.witness) <= rat(1, 2));
}

TEST_CASE("expansion oracle agreement on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(7, seed + 40, 60);
    const VertexMeasure mu = VertexMeasure::uniform(7);
    const ExpansionEstimate est = expansion_constant(g, mu);
    const auto oracle = oracle_expansion(g, mu);
    REQUIRE(est.exact.has_value());
    CHECK(*est.exact == *oracle);
  }
}

TEST_CASE("disconnected graphs do not expand") {
  const Graph g = Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const ExpansionEstimate est = expansion_constant(g, VertexMeasure::uniform(6));
  REQUIRE(est.exact.has_value());
  CHECK(*est.exact == rat(0));
}

TEST_CASE("long cycles barely expand") {
  const Graph g = gen_cycle(12);
  const ExpansionEstimate est = expansion_constant(g, VertexMeasure::uniform(12));
  REQUIRE(est.exact.has_value());
  CHECK(*est.exact == rat(1, 3));
}

TEST_CASE("exact expansion dominates the spectral bound") {
  const Graph g = k4();
  const ExpansionEstimate est = expansion_constant(g, VertexMeasure::uniform(4));
  CHECK(est.lambda2 == Catch::Approx(-1.0).margin(1e-4));
  CHECK(est.spectral_lower == Catch::Approx(2.0).margin(1e-4));
  CHECK(static_cast<double>(est.exact->get_d()) >= est.spectral_lower - 1e-6);

  const Graph c6 = gen_cycle(6);
  const ExpansionEstimate cyc = expansion_constant(c6, VertexMeasure::uniform(6));
  CHECK(cyc.lambda2 == Catch::Approx(1.0).margin(1e-3));
  CHECK(static_cast<double>(cyc.exact->get_d()) >= cyc.spectral_lower - 1e-6);
}

TEST_CASE("spectral gap of a random regular graph is positive") {
  const Graph g = gen_random_regular(400, 6, 3);
  const ExpansionEstimate est = expansion_constant(g, VertexMeasure::uniform(400));
  CHECK_FALSE(est.exact.has_value());
  CHECK(est.lambda2 < 6.0);
  CHECK(est.spectral_lower > 0.0);
}

TEST_CASE("claim two envelope for regular graphs") {
  const Graph g = gen_torus({3, 3});
  const auto env = claim2_envelope(g, VertexMeasure::uniform(9), 3, 4);
  REQUIRE(env.size() == 4);
  CHECK(env[0] == rat(2, 3));
  CHECK(env[1] == rat(4, 9));
  CHECK(env[2] == rat(8, 27));
  CHECK(env[3] == rat(16, 81));

  const Graph cubic = gen_z2_free_product(20, 3, 1);
  const auto env2 = claim2_envelope(cubic, VertexMeasure::uniform(20), 2, 2);
  CHECK(env2[0] == rat(3, 4));
  CHECK(env2[1] == rat(9, 16));
}

TEST_CASE("geometric series fit recovers the rate") {
  std::vector<std::uint32_t> stages{1, 2, 3, 4, 5};
  std::vector<Rational> series;
  Rational value = rat(1, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    series.push_back(value);
    value *= rat(3, 5);
  }
  const auto rate = fit_geometric_rate(stages, series);
  REQUIRE(rate.has_value());
  CHECK(std::abs(*rate - 0.6) < 1e-9);
}

TEST_CASE("fits are omitted without enough signal") {
  CHECK_FALSE(fit_geometric_rate({1, 2, 3}, {rat(0), rat(0), rat(0)}).has_value());
  CHECK_FALSE(fit_geometric_rate({1, 2}, {rat(1, 2), rat(1, 4)}).has_value());
}

TEST_CASE("zero flip stages satisfy the chain bound") {
  StageMetrics stage;
  stage.n = 2;
  stage.mu_O_start = rat(1, 4);
  stage.mu_I_start = rat(1, 2);
  stage.flipped_measure = rat(0);
  const BoundCheck check = check_lemma_bound(stage, 4, rat(1));
  CHECK(check.holds);
  CHECK(check.rhs == rat(2) * rat(2) * rat(4) * rat(1, 4));
}

TEST_CASE("claim two checks apply only past the recorded chain length") {
  StageMetrics stage;
  stage.n = 3;
  stage.mu_O_end = rat(1, 8);
  stage.min_chain_end = 2;
  CHECK_FALSE(check_claim2_bound(stage, rat(2), rat(1), 3).has_value());
  stage.min_chain_end.reset();
  const auto check = check_claim2_bound(stage, rat(2), rat(1), 3);
  REQUIRE(check.has_value());
  CHECK(check->rhs == rat(8, 27));
  CHECK(check->holds);
}

TEST_CASE("torus run decays at least as fast as the envelope") {
  const Graph g = gen_torus({8, 8});
  const VertexMeasure mu = VertexMeasure::uniform(64);
  const auto [o, trace] = run_theorem_dynamics(g, mu, Orientation::random(g, 1), 3, 6);
  REQUIRE_FALSE(trace.truncated);
  for (const StageMetrics& stage : trace.stages) {
    CHECK(check_lemma_bound(stage, g.degree_bound(), trace.rho).holds);
    const auto c2 = check_claim2_bound(stage, *trace.alpha, trace.rho, 3);
    if (c2) CHECK(c2->holds);
  }
  const DecayFit fit = fit_decay(trace, 3);
  REQUIRE(fit.envelope_rate.has_value());
  CHECK(*fit.envelope_rate == rat(2, 3));
  REQUIRE(fit.hypothesis_rate.has_value());
  CHECK(*fit.hypothesis_rate == rat(2, 3));
  if (fit.fitted_rate) CHECK(*fit.fitted_rate <= 2.0 / 3.0 + 1e-9);
}
