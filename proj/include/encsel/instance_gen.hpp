#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "encsel/graph.hpp"
#include "encsel/hamiltonian.hpp"
#include "encsel/performance.hpp"

namespace encsel {

using UndirectedEdge = std::pair<NodeId, NodeId>;  // first < second

struct HoleRect {
  std::size_t row0 = 0, col0 = 0, height = 0, width = 0;
};

struct GridSpec {
  std::size_t side = 0;
  std::optional<HoleRect> hole;
  // Reject the grid unless the resulting graph has a hamiltonian cycle.
  bool require_hamiltonian = false;
};

struct TriangularSpec {
  std::size_t rows = 0;
  std::size_t cut_depth = 0;  // rows removed from the apex
};

struct ThinningStep {
  DirectedGraph graph;
  UndirectedEdge removed_edge;
  bool hamiltonian = false;
};

// Successive edge removals; the last step is the first non-hamiltonian graph.
struct ThinningTrajectory {
  DirectedGraph start;
  std::vector<ThinningStep> steps;
};

inline std::vector<UndirectedEdge> undirected_edges(const DirectedGraph& g) {
  std::vector<UndirectedEdge> edges;
  for (const Arc& a : g.arcs()) {
    if (a.from < a.to && g.has_arc(a.to, a.from)) edges.emplace_back(a.from, a.to);
  }
  return edges;
}

namespace detail {

// Keeps nodes with `keep[v]` set, relabels them 1..n' in id order and drops
// edges touching removed nodes.
inline DirectedGraph compact(std::size_t n, const std::vector<char>& keep, const std::vector<UndirectedEdge>& edges) {
  std::vector<NodeId> relabel(n + 1, 0);
  NodeId next = 0;
  for (NodeId v = 1; v <= n; ++v) {
    if (keep[v]) relabel[v] = ++next;
  }
  std::vector<UndirectedEdge> kept;
  for (auto [u, v] : edges) {
    if (relabel[u] && relabel[v]) kept.emplace_back(relabel[u], relabel[v]);
  }
  return symmetric_graph(next, kept);
}

}  // namespace detail

inline void validate(const GridSpec& spec) {
  if (spec.side < 2) throw SpecError("grid side must be at least 2");
  if (spec.require_hamiltonian && spec.side % 2 != 0) {
    throw SpecError("grid side must be even when a hamiltonian cycle is required (odd-by-odd grids have none)");
  }
  if (spec.hole) {
    const auto& h = *spec.hole;
    if (h.height == 0 || h.width == 0) throw SpecError("hole must have positive height and width");
    if (h.row0 < 1 || h.col0 < 1 || h.row0 + h.height > spec.side - 1 || h.col0 + h.width > spec.side - 1) {
      throw SpecError("hole must lie strictly inside the grid, leaving the boundary ring intact");
    }
    if ((h.height * h.width) % 2 != 0) throw SpecError("hole area must be even");
  }
}

// side x side lattice, node (r, c) -> r * side + c + 1 before hole removal.
inline DirectedGraph gen_grid(const GridSpec& spec) {
  validate(spec);
  const std::size_t s = spec.side;
  const std::size_t n = s * s;
  auto id = [s](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * s + c + 1); };
  std::vector<UndirectedEdge> edges;
  for (std::size_t r = 0; r < s; ++r) {
    for (std::size_t c = 0; c < s; ++c) {
      if (c + 1 < s) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < s) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  std::vector<char> keep(n + 1, 1);
  if (spec.hole) {
    const auto& h = *spec.hole;
    for (std::size_t r = h.row0; r < h.row0 + h.height; ++r) {
      for (std::size_t c = h.col0; c < h.col0 + h.width; ++c) keep[id(r, c)] = 0;
    }
  }
  DirectedGraph g = detail::compact(n, keep, edges);
  if (spec.require_hamiltonian && !is_hamiltonian(g)) {
    throw SpecError("grid spec does not yield a hamiltonian graph");
  }
  return g;
}

inline void validate(const TriangularSpec& spec) {
  if (spec.rows < 2) throw SpecError("triangular graph needs at least 2 rows");
  if (spec.cut_depth >= spec.rows) throw SpecError("cut_depth must be smaller than rows");
}

// Row i (0-based) holds i + 1 nodes; every small triangle contributes its
// three edges. The top `cut_depth` rows are removed.
inline DirectedGraph gen_triangular(const TriangularSpec& spec) {
  validate(spec);
  const std::size_t rows = spec.rows;
  auto id = [](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * (r + 1) / 2 + c + 1); };
  const std::size_t n = rows * (rows + 1) / 2;
  std::vector<UndirectedEdge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      if (c + 1 <= r) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) {
        edges.emplace_back(id(r, c), id(r + 1, c));
        edges.emplace_back(id(r, c), id(r + 1, c + 1));
      }
    }
  }
  std::vector<char> keep(n + 1, 1);
  for (std::size_t r = 0; r < spec.cut_depth; ++r) {
    for (std::size_t c = 0; c <= r; ++c) keep[id(r, c)] = 0;
  }
  return detail::compact(n, keep, edges);
}

// Uniform sample of m distinct non-loop arcs.
inline DirectedGraph gen_random_digraph(std::size_t n, std::size_t m, std::uint64_t seed) {
  const std::size_t pairs = n * (n > 0 ? n - 1 : 0);
  if (m > pairs) throw SpecError("cannot place " + std::to_string(m) + " arcs on " + std::to_string(n) + " nodes (max " + std::to_string(pairs) + ")");
  std::vector<std::size_t> population(pairs);
  std::iota(population.begin(), population.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(m);
  std::mt19937_64 rng(seed);
  std::sample(population.begin(), population.end(), std::back_inserter(chosen), m, rng);
  std::vector<Arc> arcs;
  arcs.reserve(m);
  for (std::size_t k : chosen) {
    NodeId from = static_cast<NodeId>(k / (n - 1) + 1);
    NodeId to = static_cast<NodeId>(k % (n - 1) + 1);
    if (to >= from) ++to;
    arcs.push_back({from, to});
  }
  return DirectedGraph(n, std::move(arcs));
}

// Removes uniformly chosen undirected edges until the checker reports a
// non-hamiltonian graph. Every intermediate graph is recorded.
inline ThinningTrajectory thin_until_nonhamiltonian(const DirectedGraph& graph, std::uint64_t seed,
                                                    const HamiltonicityChecker& checker = is_hamiltonian) {
  if (!graph.is_symmetric()) throw PreconditionError("thinning requires a symmetric digraph");
  if (!checker(graph)) throw PreconditionError("thinning requires a hamiltonian input graph");

  ThinningTrajectory trajectory{graph, {}};
  std::vector<UndirectedEdge> edges = undirected_edges(graph);
  std::mt19937_64 rng(seed);
  while (!edges.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
    std::size_t i = pick(rng);
    UndirectedEdge removed = edges[i];
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
    DirectedGraph next = symmetric_graph(graph.node_count(), edges);
    bool ham = checker(next);
    trajectory.steps.push_back({std::move(next), removed, ham});
    if (!ham) break;
  }
  return trajectory;
}

struct SampledGraph {
  std::size_t step = 0;  // 0 = the unthinned start graph
  const DirectedGraph* graph = nullptr;
  bool hamiltonian = false;
};

// Picks graphs from a trajectory: the last hamiltonian graph, the first
// non-hamiltonian one, and every graph whose undirected edge count lies in
// [window_low, window_high].
inline std::vector<SampledGraph> sample_trajectory(const ThinningTrajectory& t, std::optional<std::pair<std::size_t, std::size_t>> window = {}) {
  std::set<std::size_t> picked;
  if (!t.steps.empty()) {
    picked.insert(t.steps.size());
    picked.insert(t.steps.size() - 1);
  }
  auto graph_at = [&t](std::size_t step) -> const DirectedGraph& { return step == 0 ? t.start : t.steps[step - 1].graph; };
  if (window) {
    for (std::size_t step = 0; step <= t.steps.size(); ++step) {
      std::size_t edges = graph_at(step).arc_count() / 2;
      if (edges >= window->first && edges <= window->second) picked.insert(step);
    }
  }
  std::vector<SampledGraph> out;
  for (std::size_t step : picked) {
    bool ham = step == 0 ? true : t.steps[step - 1].hamiltonian;
    out.push_back({step, &graph_at(step), ham});
  }
  return out;
}

// Instances with at least one encoding solved in [low, cutoff). The
// all-fast and all-timeout rows are excluded.
inline std::vector<std::string> filter_reasonably_hard(const PerformanceMatrix& matrix, double low = 50.0,
                                                       double cutoff = kDefaultCutoffSeconds) {
  matrix.require_complete();
  std::vector<std::string> hard;
  for (std::size_t r = 0; r < matrix.instance_count(); ++r) {
    for (std::size_t c = 0; c < matrix.encodings().size(); ++c) {
      const auto& o = matrix.outcome(r, c);
      if (o.solved() && o.runtime_s >= low && o.runtime_s < cutoff) {
        hard.push_back(matrix.instances()[r]);
        break;
      }
    }
  }
  return hard;
}

// A generated instance together with its manifest record.
struct GeneratedInstance {
  std::string id;
  std::string family;
  std::string params;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  DirectedGraph graph;
  std::optional<bool> hamiltonian;
};

// `<family>_<params>_<seed>_<step>`
inline std::string instance_name(const std::string& family, const std::string& params, std::uint64_t seed, std::size_t step) {
  return family + "_" + params + "_" + std::to_string(seed) + "_" + std::to_string(step);
}

inline std::string grid_params(const GridSpec& spec) {
  std::string p = "s" + std::to_string(spec.side);
  if (spec.hole) {
    const auto& h = *spec.hole;
    p += "h" + std::to_string(h.row0) + "x" + std::to_string(h.col0) + "x" + std::to_string(h.height) + "x" + std::to_string(h.width);
  }
  return p;
}

inline std::string triangular_params(const TriangularSpec& spec) {
  return "r" + std::to_string(spec.rows) + "c" + std::to_string(spec.cut_depth);
}

inline std::string random_params(std::size_t n, std::size_t m) { return "n" + std::to_string(n) + "m" + std::to_string(m); }

// Manifest CSV: instance_id, family, params, seed, nodes, arcs, hamiltonian_flag
// (1, 0, or empty when unknown).
inline std::string manifest_csv(const std::vector<GeneratedInstance>& batch) {
  std::string out = "instance_id,family,params,seed,nodes,arcs,hamiltonian_flag\n";
  for (const auto& g : batch) {
    out += g.id + "," + g.family + "," + g.params + "," + std::to_string(g.seed) + "," + std::to_string(g.graph.node_count()) + "," +
           std::to_string(g.graph.arc_count()) + "," + (g.hamiltonian ? (*g.hamiltonian ? "1" : "0") : "") + "\n";
  }
  return out;
}

// Mixed desk-scale batch: thinned grid trajectories, thinned triangular
// trajectories and G(n, m) digraphs, interleaved in that order until
// `count` instances exist. Deterministic in `seed`.
inline std::vector<GeneratedInstance> generate_mixed_batch(std::size_t count, std::uint64_t seed) {
  std::vector<GeneratedInstance> out;
  std::mt19937_64 rng(seed);
  const std::size_t grid_sides[] = {4, 6};
  const std::size_t tri_rows[] = {5, 6, 7};
  std::size_t round = 0;
  std::set<std::string> ids;
  auto push = [&](GeneratedInstance g) {
    if (out.size() < count && ids.insert(g.id).second) out.push_back(std::move(g));
  };
  while (out.size() < count) {
    std::uint64_t s = rng();
    s %= 1000000007ULL;
    switch (round % 3) {
      case 0: {
        GridSpec spec{grid_sides[(round / 3) % 2], std::nullopt, false};
        DirectedGraph start = gen_grid(spec);
        auto traj = thin_until_nonhamiltonian(start, s);
        std::uniform_int_distribution<std::size_t> step_pick(0, traj.steps.size());
        for (std::size_t step : {traj.steps.size() - 1, traj.steps.size(), step_pick(rng)}) {
          const DirectedGraph& g = step == 0 ? traj.start : traj.steps[step - 1].graph;
          bool ham = step == 0 ? true : traj.steps[step - 1].hamiltonian;
          push({instance_name("grid", grid_params(spec), s, step), "grid", grid_params(spec), s, step, g, ham});
        }
        break;
      }
      case 1: {
        TriangularSpec spec{tri_rows[(round / 3) % 3], (round / 3) % 2};
        DirectedGraph start = gen_triangular(spec);
        if (!is_hamiltonian(start)) {
          push({instance_name("tri", triangular_params(spec), s, 0), "tri", triangular_params(spec), s, 0, start, false});
          break;
        }
        auto traj = thin_until_nonhamiltonian(start, s);
        for (std::size_t step : {traj.steps.size() - 1, traj.steps.size()}) {
          const DirectedGraph& g = step == 0 ? traj.start : traj.steps[step - 1].graph;
          bool ham = step == 0 ? true : traj.steps[step - 1].hamiltonian;
          push({instance_name("tri", triangular_params(spec), s, step), "tri", triangular_params(spec), s, step, g, ham});
        }
        break;
      }
      default: {
        std::uniform_int_distribution<std::size_t> node_pick(8, 60);
        std::size_t n = node_pick(rng);
        std::uniform_int_distribution<std::size_t> arc_pick(n, 5 * n);
        std::size_t m = arc_pick(rng);
        push({instance_name("random", random_params(n, m), s, 0), "random", random_params(n, m), s, 0, gen_random_digraph(n, m, s),
              std::nullopt});
        // A second draw with a different density keeps random graphs at a third of the batch.
        std::size_t m2 = arc_pick(rng);
        push({instance_name("random", random_params(n, m2), s, 0), "random", random_params(n, m2), s, 0, gen_random_digraph(n, m2, s),
              std::nullopt});
        break;
      }
    }
    ++round;
  }
  return out;
}

}  // namespace encsel
