#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace sidewalk {

/// Dinic max-flow on a directed network with int64 capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t node_count)
      : head_(node_count, -1), level_(node_count, -1), iter_(node_count, -1) {}

  /// Returns the arc index of the forward arc; the reverse arc is index+1.
  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t capacity) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({to, head_[from], capacity});
    head_[from] = static_cast<std::int32_t>(id);
    arcs_.push_back({from, head_[to], 0});
    head_[to] = static_cast<std::int32_t>(id + 1);
    return id;
  }

  std::int64_t max_flow(std::size_t source, std::size_t sink) {
    std::int64_t total = 0;
    while (build_levels(source, sink)) {
      iter_ = head_;
      while (std::int64_t pushed = augment(source, sink, std::numeric_limits<std::int64_t>::max()))
        total += pushed;
    }
    return total;
  }

  /// After max_flow: nodes reachable from the source in the residual graph.
  std::vector<bool> min_cut_source_side(std::size_t source) const {
    std::vector<bool> seen(head_.size(), false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::int32_t a = head_[v]; a >= 0; a = arcs_[a].next) {
        if (arcs_[a].capacity > 0 && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = true;
          stack.push_back(arcs_[a].to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    std::int32_t next;
    std::int64_t capacity;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    level_.assign(level_.size(), -1);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop();
      for (std::int32_t a = head_[v]; a >= 0; a = arcs_[a].next) {
        if (arcs_[a].capacity > 0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[v] + 1;
          queue.push(arcs_[a].to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  std::int64_t augment(std::size_t v, std::size_t sink, std::int64_t limit) {
    if (v == sink) return limit;
    for (std::int32_t& a = iter_[v]; a >= 0; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.capacity <= 0 || level_[arc.to] != level_[v] + 1) continue;
      const std::int64_t pushed = augment(arc.to, sink, std::min(limit, arc.capacity));
      if (pushed > 0) {
        arc.capacity -= pushed;
        arcs_[a ^ 1].capacity += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::int32_t> head_;
  std::vector<Arc> arcs_;
  std::vector<std::int32_t> level_;
  std::vector<std::int32_t> iter_;
};

}  // namespace sidewalk
