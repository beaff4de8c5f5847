#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "encsel/graph.hpp"

namespace encsel {

inline constexpr std::size_t kDefaultBeamWidth = 2;

// Statistics of a single deterministic DFS. Depths count arcs from the root.
struct DfsProfile {
  std::size_t first_back_depth = 0;  // 0 when the DFS meets no back edge
  std::optional<std::size_t> back_to_root_depth;
  std::optional<std::size_t> back_to_any_depth;
  double avg_backjump_depth = 0.0;
  std::size_t sum_choices_along_path = 0;
  std::size_t one_path_len = 0;

  friend bool operator==(const DfsProfile&, const DfsProfile&) = default;
};

// Depth of the BFS tree rooted at `root`: the largest distance to a reachable node.
inline std::size_t bfs_depth_from(const DirectedGraph& graph, NodeId root) {
  std::vector<std::size_t> dist(graph.node_count() + 1, static_cast<std::size_t>(-1));
  std::vector<NodeId> queue{root};
  dist[root] = 0;
  std::size_t depth = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId v = queue[head];
    for (NodeId s : graph.successors(v)) {
      if (dist[s] != static_cast<std::size_t>(-1)) continue;
      dist[s] = dist[v] + 1;
      depth = std::max(depth, dist[s]);
      queue.push_back(s);
    }
  }
  return depth;
}

// BFS tree depth for every root 1..n, in root order.
inline std::vector<std::size_t> bfs_depths(const DirectedGraph& graph) {
  std::vector<std::size_t> depths;
  depths.reserve(graph.node_count());
  for (NodeId r = 1; r <= graph.node_count(); ++r) depths.push_back(bfs_depth_from(graph, r));
  return depths;
}

// Level-synchronous BFS that keeps at most `width` frontier nodes per level,
// the lowest ids first. Only kept nodes are marked visited.
inline std::size_t beam_depth_from(const DirectedGraph& graph, NodeId root, std::size_t width) {
  std::vector<char> visited(graph.node_count() + 1, 0);
  std::vector<NodeId> frontier{root};
  visited[root] = 1;
  std::size_t depth = 0;
  std::vector<NodeId> next;
  while (true) {
    next.clear();
    for (NodeId v : frontier) {
      for (NodeId s : graph.successors(v)) {
        if (!visited[s]) next.push_back(s);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) break;
    if (next.size() > width) next.resize(width);
    for (NodeId s : next) visited[s] = 1;
    frontier.swap(next);
    ++depth;
  }
  return depth;
}

inline std::vector<std::size_t> beam_depths(const DirectedGraph& graph, std::size_t width = kDefaultBeamWidth) {
  if (width < 1) throw PreconditionError("beam width must be at least 1");
  std::vector<std::size_t> depths;
  depths.reserve(graph.node_count());
  for (NodeId r = 1; r <= graph.node_count(); ++r) depths.push_back(beam_depth_from(graph, r, width));
  return depths;
}

// One DFS from `root`, successors in ascending order.
//   first_back_depth: depth of the node where the first back edge is met
//   back_to_root_depth: same, for the first back edge that targets the root
//   avg_backjump_depth: mean depth(source) - depth(target) over back edges
//   sum_choices_along_path: sum of max(out_degree - 1, 0) over the tree path
//     from the root to the deepest node (first such node found)
//   one_path_len: leading steps taken while the current node has exactly one
//     unvisited successor
inline DfsProfile dfs_profile(const DirectedGraph& graph, NodeId root) {
  const std::size_t n = graph.node_count();
  if (root < 1 || root > n) throw PreconditionError("dfs root " + std::to_string(root) + " is not a node");

  DfsProfile profile;
  std::vector<char> visited(n + 1, 0), on_stack(n + 1, 0);
  std::vector<std::size_t> depth(n + 1, 0);
  std::vector<NodeId> parent(n + 1, 0);

  // Explicit stack of (node, next successor index).
  std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
  visited[root] = on_stack[root] = 1;

  NodeId deepest = root;
  std::size_t back_edges = 0;
  double backjump_total = 0.0;

  {
    NodeId v = root;
    std::vector<char> seen(n + 1, 0);
    seen[root] = 1;
    while (true) {
      NodeId only = 0;
      std::size_t fresh = 0;
      for (NodeId s : graph.successors(v)) {
        if (!seen[s]) {
          ++fresh;
          only = s;
        }
      }
      if (fresh != 1) break;
      ++profile.one_path_len;
      seen[only] = 1;
      v = only;
    }
  }

  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& succ = graph.successors(v);
    if (next == succ.size()) {
      on_stack[v] = 0;
      stack.pop_back();
      continue;
    }
    NodeId s = succ[next++];
    if (!visited[s]) {
      visited[s] = on_stack[s] = 1;
      depth[s] = depth[v] + 1;
      parent[s] = v;
      if (depth[s] > depth[deepest]) deepest = s;
      stack.push_back({s, 0});
    } else if (on_stack[s]) {
      if (back_edges == 0) {
        profile.first_back_depth = depth[v];
        profile.back_to_any_depth = depth[v];
      }
      if (s == root && !profile.back_to_root_depth) profile.back_to_root_depth = depth[v];
      ++back_edges;
      backjump_total += static_cast<double>(depth[v] - depth[s]);
    }
  }

  if (back_edges > 0) profile.avg_backjump_depth = backjump_total / static_cast<double>(back_edges);
  for (NodeId v = deepest;; v = parent[v]) {
    std::size_t d = graph.out_degree(v);
    profile.sum_choices_along_path += d > 0 ? d - 1 : 0;
    if (v == root) break;
  }
  return profile;
}

}  // namespace encsel
