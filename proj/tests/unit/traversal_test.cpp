#include <gtest/gtest.h>

#include <random>

#include "encsel/instance_gen.hpp"
#include "encsel/traversal.hpp"

using namespace encsel;

namespace {

DirectedGraph g4() { return parse_facts("node(1..4). link(1,2).link(1,3).link(2,1).link(3,4).link(4,2).link(4,3)."); }

}  // namespace

TEST(Bfs, FourNodeListingFromRootOne) { EXPECT_EQ(bfs_depth_from(g4(), 1), 2u); }

TEST(Bfs, SingleNode) { EXPECT_EQ(bfs_depths(DirectedGraph(1, {})), (std::vector<std::size_t>{0})); }

TEST(Bfs, SinkRoot) {
  DirectedGraph path(3, {{1, 2}, {2, 3}});
  EXPECT_EQ(bfs_depth_from(path, 3), 0u);
  EXPECT_EQ(bfs_depths(path), (std::vector<std::size_t>{2, 1, 0}));
}

TEST(Beam, WidthOneOnFourNodeListing) { EXPECT_EQ(beam_depth_from(g4(), 1, 1), 1u); }

TEST(Beam, SingleNodeWidthOne) { EXPECT_EQ(beam_depths(DirectedGraph(1, {}), 1), (std::vector<std::size_t>{0})); }

TEST(Beam, FullWidthEqualsBfs) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    std::size_t n = 1 + rng() % 9;
    auto g = gen_random_digraph(n, rng() % (n * (n - 1) + 1), rng());
    EXPECT_EQ(beam_depths(g, n), bfs_depths(g));
  }
}

TEST(Beam, NeverDeeperThanNodeCount) {
  auto g = gen_grid({5, std::nullopt, false});
  for (auto d : beam_depths(g, 1)) EXPECT_LT(d, g.node_count());
}

TEST(Beam, ZeroWidthRejected) { EXPECT_THROW(beam_depths(g4(), 0), PreconditionError); }

TEST(Dfs, FourNodeListing) {
  auto p = dfs_profile(g4(), 1);
  EXPECT_EQ(p.first_back_depth, 1u);
  ASSERT_TRUE(p.back_to_root_depth);
  EXPECT_EQ(*p.back_to_root_depth, 1u);
}

TEST(Dfs, DirectedTriangle) {
  auto p = dfs_profile(DirectedGraph(3, {{1, 2}, {2, 3}, {3, 1}}), 1);
  EXPECT_EQ(p.first_back_depth, 2u);
  EXPECT_DOUBLE_EQ(p.avg_backjump_depth, 2.0);
  EXPECT_EQ(p.one_path_len, 2u);
  EXPECT_EQ(p.back_to_root_depth, std::optional<std::size_t>(2));
  EXPECT_EQ(p.sum_choices_along_path, 0u);
}

TEST(Dfs, AcyclicPath) {
  auto p = dfs_profile(DirectedGraph(3, {{1, 2}, {2, 3}}), 1);
  EXPECT_FALSE(p.back_to_root_depth);
  EXPECT_FALSE(p.back_to_any_depth);
  EXPECT_EQ(p.first_back_depth, 0u);
  EXPECT_DOUBLE_EQ(p.avg_backjump_depth, 0.0);
  EXPECT_EQ(p.one_path_len, 2u);
}

TEST(Dfs, RootOutOfRange) { EXPECT_THROW(dfs_profile(g4(), 5), PreconditionError); }

TEST(Dfs, DepthsAreNonNegativeAndBounded) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    std::size_t n = 1 + rng() % 9;
    auto g = gen_random_digraph(n, rng() % (n * (n - 1) + 1), rng());
    auto p = dfs_profile(g, 1);
    EXPECT_LT(p.first_back_depth, std::max<std::size_t>(n, 1));
    EXPECT_GE(p.avg_backjump_depth, 0.0);
    EXPECT_LT(p.one_path_len, std::max<std::size_t>(n, 1));
  }
}
