#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sidewalk/errors.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/rational.hpp"

namespace sidewalk {

inline constexpr std::size_t kGeneratorAttemptBudget = 1000;

/// mt19937_64 with hand-rolled bounded draws and shuffling, so identical
/// seeds give identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound), bound >= 1, by rejection.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t limit = ~0ull - ~0ull % bound;
    for (;;) {
      const std::uint64_t draw = engine_();
      if (draw < limit) return draw % bound;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i)
      std::swap(values[i - 1], values[bounded(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline std::uint64_t edge_key(Vertex u, Vertex v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

inline Graph graph_from_edge_keys(std::size_t n, const std::set<std::uint64_t>& keys) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(keys.size());
  for (std::uint64_t key : keys)
    edges.emplace_back(static_cast<Vertex>(key >> 32), static_cast<Vertex>(key & 0xffffffffu));
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace detail

/// Union of m uniformly random perfect matchings on n vertices (each
/// generator an involution); resampled until the matchings are pairwise
/// edge-disjoint, giving an m-regular graph.
inline Graph gen_z2_free_product(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw ValidationError("matchings need an even vertex count >= 2");
  if (m < 1) throw ValidationError("need at least one generator");
  Rng rng(seed);
  std::vector<Vertex> order(n);
  for (std::size_t attempt = 0; attempt < kGeneratorAttemptBudget; ++attempt) {
    std::set<std::uint64_t> keys;
    bool clash = false;
    for (std::size_t j = 0; j < m && !clash; ++j) {
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      for (std::size_t i = 0; i < n; i += 2) {
        if (!keys.insert(detail::edge_key(order[i], order[i + 1])).second) {
          clash = true;
          break;
        }
      }
    }
    if (!clash) return detail::graph_from_edge_keys(n, keys);
  }
  throw BudgetError("could not draw " + std::to_string(m) +
                    " edge-disjoint perfect matchings in " +
                    std::to_string(kGeneratorAttemptBudget) + " attempts");
}

/// Union of the cycle graphs of m uniformly random permutations of n
/// points, resampled while any permutation has a fixed point or 2-cycle or
/// any edge repeats; the result is 2m-regular.
inline Graph gen_free_group(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 3) throw ValidationError("permutation graphs need n >= 3");
  if (m < 1) throw ValidationError("need at least one generator");
  Rng rng(seed);
  std::vector<Vertex> sigma(n);
  for (std::size_t attempt = 0; attempt < kGeneratorAttemptBudget; ++attempt) {
    std::set<std::uint64_t> keys;
    bool clash = false;
    for (std::size_t j = 0; j < m && !clash; ++j) {
      std::iota(sigma.begin(), sigma.end(), 0);
      rng.shuffle(sigma);
      // With no fixed points and no 2-cycles, {x, sigma(x)} lists every
      // cycle edge exactly once, so any insert failure is a true clash.
      for (Vertex x = 0; x < n && !clash; ++x) {
        const Vertex y = sigma[x];
        if (y == x || sigma[y] == x) {
          clash = true;
          break;
        }
        if (!keys.insert(detail::edge_key(x, y)).second) clash = true;
      }
    }
    if (!clash) return detail::graph_from_edge_keys(n, keys);
  }
  throw BudgetError("could not draw " + std::to_string(m) +
                    " fixed-point-free non-overlapping permutations in " +
                    std::to_string(kGeneratorAttemptBudget) + " attempts");
}

/// Grid torus over the given dimensions, 2 |dims|-regular; a single
/// dimension gives a plain cycle.
inline Graph gen_torus(const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw ValidationError("torus needs at least one dimension");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d < 3) throw ValidationError("torus dimensions must be >= 3");
    n *= d;
  }
  std::vector<std::size_t> stride(dims.size());
  std::size_t acc = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    stride[i] = acc;
    acc *= dims[i];
  }

  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(n * dims.size());
  std::vector<std::size_t> coord(dims.size(), 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t rest = v;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      coord[i] = rest / stride[i];
      rest %= stride[i];
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const std::size_t up = (coord[i] + 1) % dims[i];
      const std::size_t w = v - coord[i] * stride[i] + up * stride[i];
      edges.emplace_back(static_cast<Vertex>(std::min(v, w)), static_cast<Vertex>(std::max(v, w)));
    }
  }
  std::sort(edges.begin(), edges.end());
  return Graph::from_edges(n, std::move(edges));
}

inline Graph gen_cycle(std::size_t n) { return gen_torus({n}); }

namespace detail {

/// One pass of stub pairing: shuffle the stubs, keep the pairs that form
/// fresh simple edges, re-pool the rest. Dead ends (remaining stubs can
/// only repeat edges) abort the attempt.
inline bool pair_stubs(std::size_t n, std::size_t d, Rng& rng, std::set<std::uint64_t>& keys) {
  std::vector<Vertex> stubs;
  stubs.reserve(n * d);
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t i = 0; i < d; ++i) stubs.push_back(v);

  while (!stubs.empty()) {
    rng.shuffle(stubs);
    std::vector<Vertex> leftover;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const Vertex u = stubs[i], v = stubs[i + 1];
      if (u == v || !keys.insert(edge_key(u, v)).second) {
        leftover.push_back(u);
        leftover.push_back(v);
      }
    }
    if (leftover.size() == stubs.size()) {
      // no progress: check whether any fresh edge is still possible
      bool possible = false;
      std::vector<Vertex> support(leftover);
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
      for (std::size_t a = 0; a < support.size() && !possible; ++a)
        for (std::size_t b = a + 1; b < support.size() && !possible; ++b)
          if (!keys.count(edge_key(support[a], support[b]))) possible = true;
      if (!possible) return false;
    }
    stubs = std::move(leftover);
  }
  return true;
}

}  // namespace detail

/// Random d-regular graph from the pairing model: stubs are matched in
/// shuffled rounds, pairs that would create loops or repeated edges are
/// thrown back, and the whole attempt restarts on a dead end.
inline Graph gen_random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d >= n) throw ValidationError("degree must be below the vertex count");
  if ((n * d) % 2 != 0) throw ValidationError("n * d must be even");
  if (d < 1) throw ValidationError("degree must be positive");
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < kGeneratorAttemptBudget; ++attempt) {
    std::set<std::uint64_t> keys;
    if (detail::pair_stubs(n, d, rng, keys)) return detail::graph_from_edge_keys(n, keys);
  }
  throw BudgetError("pairing model failed to produce a simple graph in " +
                    std::to_string(kGeneratorAttemptBudget) + " attempts");
}

enum class WeightProfile { kUniform, kTwoLevel, kRandomRange };

struct WeightSpec {
  WeightProfile profile = WeightProfile::kUniform;
  Rational level = 1;  // two-level weight, or the upper end of the random range
  std::uint64_t seed = 0;
};

/// uniform: every vertex 1 (rho = 1). two-level: the lower-index half of
/// the vertices gets weight r, the rest 1. random: weights on a 64-step
/// grid spanning [1, r]. Weights are normalized by the measure itself.
inline VertexMeasure gen_weights(const Graph& g, const WeightSpec& spec) {
  const std::size_t n = g.vertex_count();
  std::vector<Rational> w(n, Rational(1));
  switch (spec.profile) {
    case WeightProfile::kUniform:
      break;
    case WeightProfile::kTwoLevel: {
      if (spec.level <= 0) throw ValidationError("two-level weight must be positive");
      for (std::size_t v = 0; v < n / 2; ++v) w[v] = spec.level;
      break;
    }
    case WeightProfile::kRandomRange: {
      if (spec.level < 1) throw ValidationError("random weight range needs an upper end >= 1");
      Rng rng(spec.seed);
      const Rational step = (spec.level - 1) / 64;
      for (std::size_t v = 0; v < n; ++v)
        w[v] = 1 + step * Rational(static_cast<long>(rng.bounded(65)));
      break;
    }
  }
  return VertexMeasure::from_weights(std::move(w));
}

/// Generator spec string: family:key=value,... with families z2, free,
/// torus, rr, cycle; e.g. "z2:n=10000,m=3,seed=7" or "torus:dims=64x64".
struct GeneratorSpec {
  std::string family;
  std::size_t n = 0;
  std::size_t m = 1;
  std::size_t d = 0;
  std::vector<std::size_t> dims;
  std::uint64_t seed = 0;
};

inline GeneratorSpec parse_generator_spec(const std::string& text) {
  GeneratorSpec spec;
  const std::size_t colon = text.find(':');
  std::string family = text.substr(0, colon);
  if (family == "z2-free-product") family = "z2";
  if (family == "free-group") family = "free";
  if (family == "random-regular") family = "rr";
  if (family != "z2" && family != "free" && family != "torus" && family != "rr" &&
      family != "cycle")
    throw ParseError("unknown generator family '" + family + "'");
  spec.family = family;

  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    pos = comma + 1;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("generator parameter '" + item + "' needs key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    const auto as_uint = [&](const std::string& v) -> std::uint64_t {
      if (v.empty()) throw ParseError("empty value for generator parameter '" + key + "'");
      std::uint64_t out = 0;
      for (char c : v) {
        if (c < '0' || c > '9') throw ParseError("bad number '" + v + "' for parameter '" + key + "'");
        out = out * 10 + static_cast<std::uint64_t>(c - '0');
      }
      return out;
    };
    if (key == "n")
      spec.n = as_uint(value);
    else if (key == "m")
      spec.m = as_uint(value);
    else if (key == "d")
      spec.d = as_uint(value);
    else if (key == "seed")
      spec.seed = as_uint(value);
    else if (key == "dims") {
      std::size_t p = 0;
      while (p <= value.size()) {
        std::size_t x = value.find('x', p);
        if (x == std::string::npos) x = value.size();
        spec.dims.push_back(as_uint(value.substr(p, x - p)));
        p = x + 1;
      }
    } else {
      throw ParseError("unknown generator parameter '" + key + "'");
    }
  }
  return spec;
}

inline Graph build_instance(const GeneratorSpec& spec) {
  if (spec.family == "z2") return gen_z2_free_product(spec.n, spec.m, spec.seed);
  if (spec.family == "free") return gen_free_group(spec.n, spec.m, spec.seed);
  if (spec.family == "torus") return gen_torus(spec.dims);
  if (spec.family == "rr") return gen_random_regular(spec.n, spec.d, spec.seed);
  if (spec.family == "cycle") return gen_cycle(spec.n);
  throw ParseError("unknown generator family '" + spec.family + "'");
}

/// Weight spec string: "uniform", "two-level:r=2", "random:r=2,seed=5".
inline WeightSpec parse_weight_spec(const std::string& text) {
  WeightSpec spec;
  const std::size_t colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (name == "uniform") {
    spec.profile = WeightProfile::kUniform;
  } else if (name == "two-level") {
    spec.profile = WeightProfile::kTwoLevel;
    spec.level = 2;
  } else if (name == "random") {
    spec.profile = WeightProfile::kRandomRange;
    spec.level = 2;
  } else {
    throw ParseError("unknown weight profile '" + name + "'");
  }
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    pos = comma + 1;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("weight parameter '" + item + "' needs key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "r") {
      try {
        spec.level = parse_rational(value);
      } catch (const std::exception& e) {
        throw ParseError(std::string("bad weight level: ") + e.what());
      }
    } else if (key == "seed") {
      std::uint64_t out = 0;
      for (char c : value) {
        if (c < '0' || c > '9') throw ParseError("bad seed '" + value + "'");
        out = out * 10 + static_cast<std::uint64_t>(c - '0');
      }
      spec.seed = out;
    } else {
      throw ParseError("unknown weight parameter '" + key + "'");
    }
  }
  return spec;
}

}  // namespace sidewalk
