#include <gtest/gtest.h>

#include <set>

#include "encsel/instance_gen.hpp"
#include "oracles.hpp"

using namespace encsel;

TEST(Grid, SideThree) {
  auto g = gen_grid({3, std::nullopt, false});
  EXPECT_EQ(g.node_count(), 9u);
  EXPECT_EQ(g.arc_count(), 24u);
  EXPECT_TRUE(g.is_symmetric());
}

TEST(Grid, SideTen) {
  auto g = gen_grid({10, std::nullopt, false});
  EXPECT_EQ(g.node_count(), 100u);
  EXPECT_EQ(g.arc_count(), 360u);
}

TEST(Grid, ArcFormulaForEverySide) {
  for (std::size_t s = 2; s <= 9; ++s) EXPECT_EQ(gen_grid({s, std::nullopt, false}).arc_count(), 4 * s * (s - 1));
}

TEST(Grid, SideFourIsHamiltonian) { EXPECT_TRUE(hamiltonian_cycle(gen_grid({4, std::nullopt, true}))); }

TEST(Grid, OddSideRejectedWhenCycleRequired) { EXPECT_THROW(gen_grid({5, std::nullopt, true}), SpecError); }

TEST(Grid, HoleValidation) {
  EXPECT_THROW(gen_grid({6, HoleRect{0, 1, 2, 2}, false}), SpecError);  // touches the boundary
  EXPECT_THROW(gen_grid({6, HoleRect{1, 1, 5, 2}, false}), SpecError);  // reaches the last row
  EXPECT_THROW(gen_grid({6, HoleRect{1, 1, 1, 1}, false}), SpecError);  // odd area
  auto g = gen_grid({6, HoleRect{1, 1, 2, 2}, true});
  EXPECT_EQ(g.node_count(), 32u);
  EXPECT_TRUE(g.is_symmetric());
}

TEST(Grid, TooSmall) { EXPECT_THROW(gen_grid({1, std::nullopt, false}), SpecError); }

TEST(Triangular, TwoRows) {
  auto g = gen_triangular({2, 0});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.arc_count(), 6u);
}

TEST(Triangular, ThreeRowsByExplicitCount) {
  auto g = gen_triangular({3, 0});
  EXPECT_EQ(g.node_count(), 6u);
  EXPECT_EQ(g.arc_count(), 18u);
  // Rows of a triangular lattice with r rows hold 3 * r * (r - 1) / 2 edges.
  for (std::size_t r = 2; r <= 8; ++r) EXPECT_EQ(gen_triangular({r, 0}).arc_count(), 3 * r * (r - 1));
}

TEST(Triangular, CutRemovesApex) {
  auto full = gen_triangular({3, 0});
  auto cut = gen_triangular({3, 1});
  EXPECT_EQ(cut.node_count(), 5u);
  // The apex has degree 2, so two undirected edges disappear.
  EXPECT_EQ(cut.arc_count(), full.arc_count() - 4);
}

TEST(Triangular, InvalidSpecs) {
  EXPECT_THROW(gen_triangular({1, 0}), SpecError);
  EXPECT_THROW(gen_triangular({3, 3}), SpecError);
}

TEST(RandomDigraph, CompleteWhenMaximal) {
  auto g = gen_random_digraph(4, 12, 1);
  EXPECT_EQ(g.arc_count(), 12u);
  for (NodeId u = 1; u <= 4; ++u) {
    for (NodeId v = 1; v <= 4; ++v) {
      if (u != v) { EXPECT_TRUE(g.has_arc(u, v)); }
    }
  }
}

TEST(RandomDigraph, Arcless) { EXPECT_EQ(gen_random_digraph(5, 0, 3).arc_count(), 0u); }

TEST(RandomDigraph, Deterministic) {
  EXPECT_EQ(gen_random_digraph(9, 30, 77), gen_random_digraph(9, 30, 77));
  EXPECT_NE(gen_random_digraph(9, 30, 77), gen_random_digraph(9, 30, 78));
}

TEST(RandomDigraph, TooManyArcs) { EXPECT_THROW(gen_random_digraph(3, 7, 0), SpecError); }

TEST(Thinning, TerminationContract) {
  auto tri = symmetric_graph(3, {{1, 2}, {2, 3}, {1, 3}});
  auto t = thin_until_nonhamiltonian(tri, 4);
  ASSERT_FALSE(t.steps.empty());
  EXPECT_FALSE(t.steps.back().hamiltonian);
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) EXPECT_TRUE(t.steps[i].hamiltonian);
}

TEST(Thinning, EachStepRemovesOneEdge) {
  auto t = thin_until_nonhamiltonian(gen_grid({4, std::nullopt, false}), 21);
  const DirectedGraph* prev = &t.start;
  for (const auto& step : t.steps) {
    EXPECT_EQ(step.graph.arc_count() + 2, prev->arc_count());
    EXPECT_TRUE(prev->has_arc(step.removed_edge.first, step.removed_edge.second));
    EXPECT_FALSE(step.graph.has_arc(step.removed_edge.first, step.removed_edge.second));
    EXPECT_FALSE(step.graph.has_arc(step.removed_edge.second, step.removed_edge.first));
    prev = &step.graph;
  }
}

TEST(Thinning, ReproducibleUnderSeed) {
  auto grid = gen_grid({4, std::nullopt, false});
  auto a = thin_until_nonhamiltonian(grid, 8);
  auto b = thin_until_nonhamiltonian(grid, 8);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].removed_edge, b.steps[i].removed_edge);
    EXPECT_EQ(a.steps[i].graph, b.steps[i].graph);
  }
}

TEST(Thinning, FinalGraphConfirmedByIndependentOracle) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto t = thin_until_nonhamiltonian(gen_grid({4, std::nullopt, false}), seed);
    EXPECT_FALSE(oracle::hamiltonian_by_subset_dp(t.steps.back().graph));
  }
}

TEST(Thinning, UsesInjectedChecker) {
  std::size_t calls = 0;
  auto counting = [&calls](const DirectedGraph& g) {
    ++calls;
    return is_hamiltonian(g);
  };
  auto t = thin_until_nonhamiltonian(gen_grid({4, std::nullopt, false}), 2, counting);
  EXPECT_EQ(calls, t.steps.size() + 1);
}

TEST(Thinning, Preconditions) {
  EXPECT_THROW(thin_until_nonhamiltonian(DirectedGraph(2, {{1, 2}}), 0), PreconditionError);
  EXPECT_THROW(thin_until_nonhamiltonian(gen_grid({3, std::nullopt, false}), 0), PreconditionError);
}

TEST(Thinning, SampleKeepsBoundaryGraphs) {
  auto t = thin_until_nonhamiltonian(gen_grid({4, std::nullopt, false}), 3);
  auto picked = sample_trajectory(t);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_TRUE(picked.front().hamiltonian);
  EXPECT_FALSE(picked.back().hamiltonian);
  auto all = sample_trajectory(t, std::make_pair(std::size_t{0}, std::size_t{1000}));
  EXPECT_EQ(all.size(), t.steps.size() + 1);
}

namespace {

PerformanceMatrix table_two_like() {
  // One encoding, 500 rows: 330 fast, 52 in the window, 118 timeouts.
  PerformanceMatrix m(200.0, {EncodingId(2)});
  for (int i = 0; i < 500; ++i) {
    std::string id = "i" + std::to_string(i);
    if (i < 330) {
      m.set(id, EncodingId(2), make_outcome(RunStatus::SAT, 0.5 + i * 0.1, 200.0));
    } else if (i < 382) {
      m.set(id, EncodingId(2), make_outcome(RunStatus::UNSAT, 50.0 + (i - 330) * 2.5, 200.0));
    } else {
      m.set(id, EncodingId(2), make_outcome(RunStatus::TIMEOUT, 200.0, 200.0));
    }
  }
  return m;
}

}  // namespace

TEST(ReasonablyHard, TableTwoMarginals) { EXPECT_EQ(filter_reasonably_hard(table_two_like(), 50, 200).size(), 52u); }

TEST(ReasonablyHard, AllFastOrAllTimeoutExcluded) {
  PerformanceMatrix m(200.0, {EncodingId(1), EncodingId(2)});
  m.set("fast", EncodingId(1), make_outcome(RunStatus::SAT, 10, 200));
  m.set("fast", EncodingId(2), make_outcome(RunStatus::SAT, 10, 200));
  m.set("hard", EncodingId(1), make_outcome(RunStatus::TIMEOUT, 200, 200));
  m.set("hard", EncodingId(2), make_outcome(RunStatus::TIMEOUT, 200, 200));
  m.set("mid", EncodingId(1), make_outcome(RunStatus::TIMEOUT, 200, 200));
  m.set("mid", EncodingId(2), make_outcome(RunStatus::SAT, 50, 200));
  EXPECT_EQ(filter_reasonably_hard(m), (std::vector<std::string>{"mid"}));
}

TEST(ReasonablyHard, IncompleteMatrixRejected) {
  PerformanceMatrix m(200.0, {EncodingId(1), EncodingId(2)});
  m.set("x", EncodingId(1), make_outcome(RunStatus::SAT, 60, 200));
  EXPECT_THROW(filter_reasonably_hard(m), DataError);
}

TEST(MixedBatch, DeterministicAndUnique) {
  auto a = generate_mixed_batch(40, 5);
  auto b = generate_mixed_batch(40, 5);
  ASSERT_EQ(a.size(), 40u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].graph, b[i].graph);
    ids.insert(a[i].id);
    if (a[i].hamiltonian) { EXPECT_EQ(*a[i].hamiltonian, is_hamiltonian(a[i].graph)); }
  }
  EXPECT_EQ(ids.size(), a.size());
}

TEST(MixedBatch, ManifestHasOneLinePerInstance) {
  auto batch = generate_mixed_batch(10, 1);
  auto csv = manifest_csv(batch);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "instance_id,family,params,seed,nodes,arcs,hamiltonian_flag");
}
