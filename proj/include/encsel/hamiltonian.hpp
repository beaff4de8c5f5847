#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "encsel/graph.hpp"

namespace encsel {

// A hamiltonian cycle as a node order starting at node 1. The closing arc
// runs from the last node back to the first.
struct CycleWitness {
  std::vector<NodeId> order;

  friend bool operator==(const CycleWitness&, const CycleWitness&) = default;
};

// Checks the witness against the graph without re-solving.
inline bool is_valid_witness(const DirectedGraph& graph, const CycleWitness& witness) {
  const std::size_t n = graph.node_count();
  if (n == 0 || witness.order.size() != n) return false;
  std::vector<char> seen(n + 1, 0);
  for (NodeId v : witness.order) {
    if (v < 1 || v > n || seen[v]) return false;
    seen[v] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!graph.has_arc(witness.order[i], witness.order[(i + 1) % n])) return false;
  }
  return true;
}

// Decides hamiltonicity; the checker injected into instance thinning.
using HamiltonicityChecker = std::function<bool(const DirectedGraph&)>;

namespace detail {

// Exact backtracking from node 1. Successors are tried in ascending order;
// each partial path is pruned by degree feasibility of the unvisited nodes,
// forced arcs (a node whose only usable predecessor is the path end), and
// reachability of all unvisited nodes from the path end.
class HamiltonSearch {
 public:
  explicit HamiltonSearch(const DirectedGraph& g) : g_(g), n_(g.node_count()), visited_(n_ + 1, 0), mark_(n_ + 1, 0) {}

  std::optional<CycleWitness> run() {
    if (n_ < 2) return std::nullopt;
    path_.reserve(n_);
    path_.push_back(1);
    visited_[1] = 1;
    if (extend(1)) return CycleWitness{path_};
    return std::nullopt;
  }

 private:
  bool usable_pred(NodeId p, NodeId w, NodeId cur) const { return p == cur || (!visited_[p] && p != w); }
  bool usable_succ(NodeId s, NodeId w) const { return s == 1 || (!visited_[s] && s != w); }

  bool extend(NodeId cur) {
    if (path_.size() == n_) return g_.has_arc(cur, 1);

    // Node 1 still needs an unvisited predecessor to close the cycle.
    bool closable = false;
    for (NodeId p : g_.predecessors(1)) {
      if (!visited_[p]) {
        closable = true;
        break;
      }
    }
    if (!closable) return false;

    NodeId forced = 0;
    for (NodeId w = 2; w <= n_; ++w) {
      if (visited_[w]) continue;
      std::size_t preds = 0;
      bool from_cur = false;
      for (NodeId p : g_.predecessors(w)) {
        if (usable_pred(p, w, cur)) {
          ++preds;
          if (p == cur) from_cur = true;
        }
      }
      if (preds == 0) return false;
      bool has_succ = false;
      for (NodeId s : g_.successors(w)) {
        if (usable_succ(s, w)) {
          has_succ = true;
          break;
        }
      }
      if (!has_succ) return false;
      if (preds == 1 && from_cur) {
        if (forced != 0) return false;
        forced = w;
      }
    }

    if (!unvisited_reachable(cur)) return false;

    for (NodeId u : g_.successors(cur)) {
      if (visited_[u]) continue;
      if (forced != 0 && u != forced) continue;
      visited_[u] = 1;
      path_.push_back(u);
      if (extend(u)) return true;
      path_.pop_back();
      visited_[u] = 0;
    }
    return false;
  }

  bool unvisited_reachable(NodeId cur) {
    ++epoch_;
    if (epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
    stack_.clear();
    stack_.push_back(cur);
    std::size_t reached = 0;
    while (!stack_.empty()) {
      NodeId v = stack_.back();
      stack_.pop_back();
      for (NodeId s : g_.successors(v)) {
        if (visited_[s] || mark_[s] == epoch_) continue;
        mark_[s] = epoch_;
        ++reached;
        stack_.push_back(s);
      }
    }
    return reached == n_ - path_.size();
  }

  const DirectedGraph& g_;
  std::size_t n_;
  std::vector<char> visited_;
  std::vector<unsigned> mark_;
  unsigned epoch_ = 0;
  std::vector<NodeId> path_;
  std::vector<NodeId> stack_;
};

}  // namespace detail

// Exact hamiltonian-cycle search. Returns the lexicographically first witness
// found from node 1 with ascending successor order, or nullopt. A single
// node has no cycle since self-loops are not allowed.
inline std::optional<CycleWitness> hamiltonian_cycle(const DirectedGraph& graph) {
  return detail::HamiltonSearch(graph).run();
}

inline bool is_hamiltonian(const DirectedGraph& graph) { return hamiltonian_cycle(graph).has_value(); }

}  // namespace encsel
