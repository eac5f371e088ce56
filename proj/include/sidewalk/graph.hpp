#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sidewalk/errors.hpp"

namespace sidewalk {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

/// Subset of the vertex range, as a bitset with a maintained cardinality.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe) : bits_((universe + 63) / 64, 0), universe_(universe) {}

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(Vertex v) const {
    return v < universe_ && (bits_[v >> 6] >> (v & 63)) & 1u;
  }

  void add(Vertex v) {
    check_range(v);
    std::uint64_t& word = bits_[v >> 6];
    const std::uint64_t mask = 1ull << (v & 63);
    if (!(word & mask)) {
      word |= mask;
      ++count_;
    }
  }

  void remove(Vertex v) {
    check_range(v);
    std::uint64_t& word = bits_[v >> 6];
    const std::uint64_t mask = 1ull << (v & 63);
    if (word & mask) {
      word &= ~mask;
      --count_;
    }
  }

  /// Ascending vertex order.
  template <typename F>
  void for_each(F&& fn) const {
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word) {
        const int bit = __builtin_ctzll(word);
        fn(static_cast<Vertex>(w * 64 + bit));
        word &= word - 1;
      }
    }
  }

  std::vector<Vertex> to_vector() const {
    std::vector<Vertex> out;
    out.reserve(count_);
    for_each([&](Vertex v) { out.push_back(v); });
    return out;
  }

  static VertexSet full(std::size_t universe) {
    VertexSet s(universe);
    for (std::size_t v = 0; v < universe; ++v) s.add(static_cast<Vertex>(v));
    return s;
  }

  bool operator==(const VertexSet& other) const {
    return universe_ == other.universe_ && bits_ == other.bits_;
  }

 private:
  void check_range(Vertex v) const {
    if (v >= universe_) throw ValidationError("vertex " + std::to_string(v) + " outside universe");
  }

  std::vector<std::uint64_t> bits_;
  std::size_t universe_ = 0;
  std::size_t count_ = 0;
};

/// Finite simple undirected graph. Vertices are dense integers 0..n-1,
/// edges are stored once as (lo, hi) pairs with lo < hi, and the adjacency
/// is sorted by neighbor. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(std::size_t vertex_count, std::vector<std::pair<Vertex, Vertex>> edges) {
    Graph g;
    g.n_ = vertex_count;
    g.edges_ = std::move(edges);
    g.validate_and_index();
    return g;
  }

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t degree_bound() const { return degree_bound_; }

  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }
  std::pair<Vertex, Vertex> edge(EdgeId e) const { return edges_[e]; }

  std::uint32_t degree(Vertex v) const { return adj_off_[v + 1] - adj_off_[v]; }

  /// Neighbors of v in ascending order.
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_vert_.data() + adj_off_[v], adj_vert_.data() + adj_off_[v + 1]};
  }

  /// Edge ids aligned with neighbors(v).
  std::span<const EdgeId> incident_edges(Vertex v) const {
    return {adj_edge_.data() + adj_off_[v], adj_edge_.data() + adj_off_[v + 1]};
  }

  std::optional<EdgeId> edge_id(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_ || u == v) return std::nullopt;
    const auto nbrs = neighbors(u);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
    if (it == nbrs.end() || *it != v) return std::nullopt;
    return incident_edges(u)[static_cast<std::size_t>(it - nbrs.begin())];
  }

  bool adjacent(Vertex u, Vertex v) const { return edge_id(u, v).has_value(); }

  /// Degree of the regular graph, if the graph is regular.
  std::optional<std::uint32_t> regular_degree() const {
    if (n_ == 0) return std::nullopt;
    const std::uint32_t d = degree(0);
    for (Vertex v = 1; v < n_; ++v)
      if (degree(v) != d) return std::nullopt;
    return d;
  }

  /// Vertex sets of the connected components, in ascending order of their
  /// smallest vertex.
  std::vector<std::vector<Vertex>> components() const {
    std::vector<std::vector<Vertex>> comps;
    std::vector<bool> seen(n_, false);
    std::vector<Vertex> queue;
    for (Vertex s = 0; s < n_; ++s) {
      if (seen[s]) continue;
      comps.emplace_back();
      auto& comp = comps.back();
      seen[s] = true;
      queue.assign(1, s);
      while (!queue.empty()) {
        const Vertex v = queue.back();
        queue.pop_back();
        comp.push_back(v);
        for (Vertex w : neighbors(v)) {
          if (!seen[w]) {
            seen[w] = true;
            queue.push_back(w);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
    }
    return comps;
  }

 private:
  void validate_and_index() {
    std::unordered_set<std::uint64_t> keys;
    keys.reserve(edges_.size() * 2);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto [u, v] = edges_[i];
      if (u == v)
        throw ValidationError("self-loop at vertex " + std::to_string(u) + " (edge " +
                              std::to_string(i) + ")");
      if (u > v)
        throw ValidationError("edge " + std::to_string(i) + " not in lo hi order: " +
                              std::to_string(u) + " " + std::to_string(v));
      if (v >= n_)
        throw ValidationError("edge " + std::to_string(i) + " references vertex " +
                              std::to_string(v) + " outside 0.." + std::to_string(n_) + "-1");
      const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
      if (!keys.insert(key).second)
        throw ValidationError("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    }

    adj_off_.assign(n_ + 1, 0);
    for (const auto& [u, v] : edges_) {
      ++adj_off_[u + 1];
      ++adj_off_[v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) adj_off_[i + 1] += adj_off_[i];

    adj_vert_.resize(edges_.size() * 2);
    adj_edge_.resize(edges_.size() * 2);
    std::vector<std::uint32_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [u, v] = edges_[e];
      adj_vert_[cursor[u]] = v;
      adj_edge_[cursor[u]++] = static_cast<EdgeId>(e);
      adj_vert_[cursor[v]] = u;
      adj_edge_[cursor[v]++] = static_cast<EdgeId>(e);
    }
    for (Vertex v = 0; v < n_; ++v) {
      const std::size_t lo = adj_off_[v], hi = adj_off_[v + 1];
      std::vector<std::pair<Vertex, EdgeId>> row;
      row.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) row.emplace_back(adj_vert_[i], adj_edge_[i]);
      std::sort(row.begin(), row.end());
      for (std::size_t i = lo; i < hi; ++i) {
        adj_vert_[i] = row[i - lo].first;
        adj_edge_[i] = row[i - lo].second;
      }
    }

    degree_bound_ = 0;
    for (Vertex v = 0; v < n_; ++v) degree_bound_ = std::max(degree_bound_, degree(v));
  }

  std::size_t n_ = 0;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<Vertex> adj_vert_;
  std::vector<EdgeId> adj_edge_;
  std::vector<std::uint32_t> adj_off_{0};
  std::uint32_t degree_bound_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::istringstream in{std::string(line)};
  std::string f;
  while (in >> f) fields.push_back(f);
  return fields;
}

inline std::uint64_t parse_uint(const std::string& token, std::size_t line_no,
                                const char* what) {
  std::uint64_t value = 0;
  if (token.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty " + what);
  for (char c : token) {
    if (c < '0' || c > '9')
      throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + token + "'");
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
    if (value > 0xffffffffull)
      throw ParseError("line " + std::to_string(line_no) + ": " + what + " out of range");
  }
  return value;
}

}  // namespace detail

/// Parse the edge-list format: first line "n m", then m lines "u v" with
/// 0 <= u < v < n. Errors carry 1-based line numbers.
inline Graph parse_edge_list(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("line 1: missing header \"n m\"");
  const auto header = detail::split_fields(lines[0]);
  if (header.size() != 2) throw ParseError("line 1: header must be \"n m\"");
  const std::uint64_t n = detail::parse_uint(header[0], 1, "vertex count");
  const std::uint64_t m = detail::parse_uint(header[1], 1, "edge count");
  if (lines.size() != m + 1)
    throw ParseError("expected " + std::to_string(m) + " edge lines, found " +
                     std::to_string(lines.size() - 1));

  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(m);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 2)
      throw ParseError("line " + std::to_string(i + 1) + ": expected \"u v\"");
    const std::uint64_t u = detail::parse_uint(fields[0], i + 1, "vertex");
    const std::uint64_t v = detail::parse_uint(fields[1], i + 1, "vertex");
    // Accept either endpoint order on input; storage is lo-hi canonical.
    edges.emplace_back(static_cast<Vertex>(std::min(u, v)), static_cast<Vertex>(std::max(u, v)));
  }
  try {
    return Graph::from_edges(n, std::move(edges));
  } catch (const ValidationError& err) {
    throw ValidationError(std::string(err.what()));
  }
}

inline std::string format_edge_list(const Graph& g) {
  std::string out = std::to_string(g.vertex_count()) + " " + std::to_string(g.edge_count()) + "\n";
  for (const auto& [u, v] : g.edges())
    out += std::to_string(u) + " " + std::to_string(v) + "\n";
  return out;
}

inline Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str());
}

}  // namespace sidewalk
