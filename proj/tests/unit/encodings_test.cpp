#include <gtest/gtest.h>

#include <random>
#include <set>

#include "encsel/encodings.hpp"
#include "encsel/instance_gen.hpp"
#include "oracles.hpp"

using namespace encsel;

namespace {

DirectedGraph g4() { return parse_facts("node(1..4). link(1,2).link(1,3).link(2,1).link(3,4).link(4,2).link(4,3)."); }

bool contains(std::string_view text, std::string_view needle) { return text.find(needle) != std::string_view::npos; }

void expect_matches_grounder(EncodingId e, const DirectedGraph& g) {
  auto c = static_counts(e, g);
  auto ref = oracle::ground_program(render_program(e, g));
  SCOPED_TRACE(to_string(e) + " on\n" + emit_facts(g));
  EXPECT_EQ(c.rules, ref.rules);
  EXPECT_EQ(c.choice_rules, ref.choice);
  EXPECT_EQ(c.normal_rules, ref.normal);
  EXPECT_EQ(c.cardinality_rules, 0u);
  EXPECT_EQ(c.unary_rules, ref.unary);
  EXPECT_EQ(c.binary_rules, ref.binary);
  EXPECT_EQ(c.ternary_rules, ref.ternary);
  EXPECT_EQ(c.constraints, ref.constraints);
  EXPECT_EQ(c.binary_constraints, ref.binary_constraints);
  EXPECT_EQ(c.ternary_constraints, ref.ternary_constraints);
  EXPECT_EQ(c.other_constraints, ref.other_constraints);
  EXPECT_EQ(c.problem_variables, ref.problem_variables);
  EXPECT_EQ(c.assigned_problem_variables, ref.assigned);
  EXPECT_EQ(c.free_problem_variables, ref.free);
}

}  // namespace

TEST(Registry, SixEncodingsCoverTheStyleProduct) {
  const auto& all = list_encodings();
  ASSERT_EQ(all.size(), 6u);
  std::set<std::pair<SelectionStyle, ReachStyle>> styles;
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].id.value(), static_cast<int>(i) + 1);
    styles.insert({all[i].selection_style, all[i].reach_style});
  }
  EXPECT_EQ(styles.size(), 6u);
}

TEST(Registry, FirstEncodingIsThePublishedListing) {
  const auto& e1 = encoding(EncodingId(1));
  EXPECT_FALSE(e1.reconstructed);
  EXPECT_TRUE(contains(e1.program_template, "{ hcyc(X,Y) : link(X,Y) }=1 :- node(X)."));
  EXPECT_TRUE(contains(e1.program_template, "{ hcyc(X,Y) : link(X,Y) }=1 :- node(Y)."));
  EXPECT_TRUE(contains(e1.program_template, "reach(X,Z) :- reach(X,Y),hcyc(Y,Z)."));
  for (int k = 2; k <= 6; ++k) EXPECT_TRUE(encoding(EncodingId(k)).reconstructed);
}

TEST(Registry, TemplatesUseOnlyTheSharedPredicates) {
  for (const auto& spec : list_encodings()) {
    std::string text(spec.program_template);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (!std::islower(static_cast<unsigned char>(text[i])) || (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1])))) continue;
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      if (j < text.size() && text[j] == '(') {
        std::string pred = text.substr(i, j - i);
        EXPECT_TRUE(pred == "node" || pred == "link" || pred == "hcyc" || pred == "reach") << pred;
      }
      i = j;
    }
  }
}

TEST(Render, FirstEncodingOnFourNodeListing) {
  auto text = render_program(EncodingId(1), g4());
  EXPECT_TRUE(contains(text, "node(1..4)."));
  EXPECT_TRUE(contains(text, ":- not reach(X,Y),node(X),node(Y)."));
  EXPECT_EQ(text, render_program(EncodingId(1), g4()));
}

TEST(Render, RootReachMentionsNodeOne) {
  for (const auto& spec : list_encodings()) {
    if (spec.reach_style == ReachStyle::RootReach) { EXPECT_TRUE(contains(render_program(spec.id, g4()), "hcyc(1,Y)")); }
  }
}

TEST(StaticCounts, FirstEncodingOnFourNodeListing) {
  auto c = static_counts(EncodingId(1), g4());
  EXPECT_EQ(c.choice_rules, 8u);
  EXPECT_EQ(c.normal_rules, 30u);
  EXPECT_EQ(c.binary_rules, 24u);
  EXPECT_EQ(c.constraints, 16u);
  EXPECT_EQ(c.ternary_constraints, 16u);
  EXPECT_EQ(c.rules, 38u);
  EXPECT_EQ(c.unary_rules, 6u);
  EXPECT_EQ(c.problem_variables, 32u);
  EXPECT_EQ(c.assigned_problem_variables, 10u);
  EXPECT_EQ(c.free_problem_variables, 22u);
}

TEST(StaticCounts, FirstEncodingOnSingleNode) {
  auto c = static_counts(EncodingId(1), DirectedGraph(1, {}));
  EXPECT_EQ(c.choice_rules, 2u);
  EXPECT_EQ(c.rules, 2u);
  EXPECT_EQ(c.constraints, 1u);
  EXPECT_EQ(c.problem_variables, 2u);
}

TEST(StaticCounts, PartitionsAreConsistent) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::size_t n = 1 + rng() % 8;
    auto g = gen_random_digraph(n, rng() % (n * (n - 1) + 1), rng());
    for (EncodingId e : all_encoding_ids()) {
      auto c = static_counts(e, g);
      EXPECT_EQ(c.normal_rules + c.choice_rules + c.cardinality_rules, c.rules);
      EXPECT_EQ(c.unary_rules + c.binary_rules + c.ternary_rules, c.normal_rules);
      EXPECT_EQ(c.binary_constraints + c.ternary_constraints + c.other_constraints, c.constraints);
      EXPECT_EQ(c.assigned_problem_variables + c.free_problem_variables, c.problem_variables);
    }
  }
}

TEST(StaticCounts, MatchesNaiveGrounderOnFixedGraphs) {
  for (EncodingId e : all_encoding_ids()) {
    expect_matches_grounder(e, g4());
    expect_matches_grounder(e, DirectedGraph(1, {}));
    expect_matches_grounder(e, DirectedGraph(3, {}));
    expect_matches_grounder(e, gen_grid({3, std::nullopt, false}));
  }
}

TEST(StaticCounts, MatchesNaiveGrounderOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 30; ++i) {
    std::size_t n = 1 + rng() % 6;
    auto g = gen_random_digraph(n, rng() % (n * (n - 1) + 1), rng());
    for (EncodingId e : all_encoding_ids()) expect_matches_grounder(e, g);
  }
}
