#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sidewalk/errors.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/rational.hpp"

namespace sidewalk {

/// Strictly positive vertex weights normalized to total mass 1. Induces the
/// cocycle rho(x,y) = w(y)/w(x) along edges.
class VertexMeasure {
 public:
  VertexMeasure() = default;

  static VertexMeasure from_weights(std::vector<Rational> raw) {
    VertexMeasure m;
    Rational total = 0;
    for (std::size_t v = 0; v < raw.size(); ++v) {
      if (raw[v] <= 0)
        throw ValidationError("weight of vertex " + std::to_string(v) + " not positive");
      total += raw[v];
    }
    if (!raw.empty() && total == 0) throw ValidationError("weights sum to zero");
    for (auto& w : raw) w /= total;
    m.weight_ = std::move(raw);
    return m;
  }

  static VertexMeasure uniform(std::size_t vertex_count) {
    return from_weights(std::vector<Rational>(vertex_count, Rational(1)));
  }

  std::size_t vertex_count() const { return weight_.size(); }
  const Rational& weight(Vertex v) const { return weight_[v]; }

  Rational mass(const VertexSet& set) const {
    Rational total = 0;
    set.for_each([&](Vertex v) { total += weight_[v]; });
    return total;
  }

  Rational cocycle(Vertex x, Vertex y) const { return weight_[y] / weight_[x]; }

  bool is_uniform() const {
    for (std::size_t v = 1; v < weight_.size(); ++v)
      if (weight_[v] != weight_[0]) return false;
    return true;
  }

 private:
  std::vector<Rational> weight_;
};

/// rho = max over adjacent ordered pairs (x,y) of w(y)/w(x). Equals 1 when
/// the graph has an edge and weights are uniform; defined as 1 on edgeless
/// graphs.
inline Rational cocycle_bound(const Graph& g, const VertexMeasure& mu) {
  Rational best = 1;
  for (const auto& [u, v] : g.edges()) {
    best = std::max(best, mu.cocycle(u, v));
    best = std::max(best, mu.cocycle(v, u));
  }
  return best;
}

/// Measure of a set of oriented edge copies: sum of w(x) over pairs (x,y).
inline Rational edge_measure(const Graph& g, const VertexMeasure& mu,
                             const std::vector<std::pair<Vertex, Vertex>>& oriented_pairs) {
  Rational total = 0;
  for (const auto& [x, y] : oriented_pairs) {
    if (!g.edge_id(std::min(x, y), std::max(x, y)))
      throw ValidationError("pair " + std::to_string(x) + " " + std::to_string(y) +
                            " is not an edge of the graph");
    total += mu.weight(x);
  }
  return total;
}

/// Weight file format: n lines "v numerator denominator", one per vertex.
inline VertexMeasure parse_weights(std::string_view text, std::size_t vertex_count) {
  const auto lines = detail::split_lines(text);
  if (lines.size() != vertex_count)
    throw ParseError("expected " + std::to_string(vertex_count) + " weight lines, found " +
                     std::to_string(lines.size()));
  std::vector<Rational> raw(vertex_count, Rational(0));
  std::vector<bool> seen(vertex_count, false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 3)
      throw ParseError("line " + std::to_string(i + 1) + ": expected \"v numerator denominator\"");
    const std::uint64_t v = detail::parse_uint(fields[0], i + 1, "vertex");
    if (v >= vertex_count)
      throw ParseError("line " + std::to_string(i + 1) + ": vertex " + std::to_string(v) +
                       " out of range");
    if (seen[v])
      throw ParseError("line " + std::to_string(i + 1) + ": duplicate vertex " + std::to_string(v));
    seen[v] = true;
    Rational num, den;
    try {
      num = parse_rational(fields[1]);
      den = parse_rational(fields[2]);
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (den == 0) throw ParseError("line " + std::to_string(i + 1) + ": zero denominator");
    raw[v] = num / den;
  }
  return VertexMeasure::from_weights(std::move(raw));
}

inline VertexMeasure load_weights(const std::filesystem::path& path, std::size_t vertex_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_weights(buf.str(), vertex_count);
}

inline std::string format_weights(const VertexMeasure& mu) {
  std::string out;
  for (std::size_t v = 0; v < mu.vertex_count(); ++v) {
    const Rational& w = mu.weight(v);
    out += std::to_string(v) + " " + w.get_num().get_str() + " " + w.get_den().get_str() + "\n";
  }
  return out;
}

}  // namespace sidewalk
