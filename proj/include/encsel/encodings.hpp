#pragma once

#include <array>
#include <string>
#include <string_view>

#include "encsel/encoding_id.hpp"
#include "encsel/graph.hpp"

namespace encsel {

enum class SelectionStyle { PairedExactChoice, OpenChoiceWithConstraints, AggregateCountConstraints };
enum class ReachStyle { PairwiseReach, RootReach };

inline std::string to_string(SelectionStyle s) {
  switch (s) {
    case SelectionStyle::PairedExactChoice: return "paired-exact-choice";
    case SelectionStyle::OpenChoiceWithConstraints: return "open-choice-with-constraints";
    case SelectionStyle::AggregateCountConstraints: return "aggregate-count-constraints";
  }
  return {};
}

inline std::string to_string(ReachStyle s) { return s == ReachStyle::PairwiseReach ? "pairwise-reach" : "root-reach"; }

struct EncodingSpec {
  EncodingId id;
  SelectionStyle selection_style;
  ReachStyle reach_style;
  std::string_view program_template;
  // Encoding 1 is the published listing; the others are rewrites along the
  // edge-selection and reachability axes.
  bool reconstructed;
};

namespace detail {

inline constexpr std::string_view kPairedExactChoice =
    "{ hcyc(X,Y) : link(X,Y) }=1 :- node(X).\n"
    "{ hcyc(X,Y) : link(X,Y) }=1 :- node(Y).\n";

inline constexpr std::string_view kOpenChoice =
    "{ hcyc(X,Y) : link(X,Y) } :- node(X).\n"
    ":- node(X), not 1 { hcyc(X,Y) : link(X,Y) } 1.\n"
    ":- node(Y), not 1 { hcyc(X,Y) : link(X,Y) } 1.\n";

inline constexpr std::string_view kAggregateCount =
    "{ hcyc(X,Y) } :- link(X,Y).\n"
    ":- node(X), #count{ Y : hcyc(X,Y) } != 1.\n"
    ":- node(Y), #count{ X : hcyc(X,Y) } != 1.\n";

inline constexpr std::string_view kPairwiseReach =
    "reach(X,Y) :- hcyc(X,Y).\n"
    "reach(X,Z) :- reach(X,Y),hcyc(Y,Z).\n"
    ":- not reach(X,Y),node(X),node(Y).\n";

inline constexpr std::string_view kRootReach =
    "reach(Y) :- hcyc(1,Y).\n"
    "reach(Y) :- reach(X), hcyc(X,Y).\n"
    ":- node(Y), not reach(Y).\n";

}  // namespace detail

// The fixed registry: selection style x reachability style, selection style
// varying slowest.
inline const std::array<EncodingSpec, kEncodingCount>& list_encodings() {
  using S = SelectionStyle;
  using R = ReachStyle;
  static const std::array<std::string, kEncodingCount> text{
      std::string(detail::kPairedExactChoice) + std::string(detail::kPairwiseReach),
      std::string(detail::kPairedExactChoice) + std::string(detail::kRootReach),
      std::string(detail::kOpenChoice) + std::string(detail::kPairwiseReach),
      std::string(detail::kOpenChoice) + std::string(detail::kRootReach),
      std::string(detail::kAggregateCount) + std::string(detail::kPairwiseReach),
      std::string(detail::kAggregateCount) + std::string(detail::kRootReach),
  };
  static const std::array<EncodingSpec, kEncodingCount> registry{{
      {EncodingId(1), S::PairedExactChoice, R::PairwiseReach, text[0], false},
      {EncodingId(2), S::PairedExactChoice, R::RootReach, text[1], true},
      {EncodingId(3), S::OpenChoiceWithConstraints, R::PairwiseReach, text[2], true},
      {EncodingId(4), S::OpenChoiceWithConstraints, R::RootReach, text[3], true},
      {EncodingId(5), S::AggregateCountConstraints, R::PairwiseReach, text[4], true},
      {EncodingId(6), S::AggregateCountConstraints, R::RootReach, text[5], true},
  }};
  return registry;
}

inline const EncodingSpec& encoding(EncodingId id) { return list_encodings()[id.slot()]; }

// Instance facts followed by the encoding rules.
inline std::string render_program(EncodingId enc, const DirectedGraph& graph) {
  std::string text = emit_facts(graph);
  text += "\n";
  text += encoding(enc).program_template;
  return text;
}

// Sizes of the naive ground instantiation of an encoding over a graph.
// Conventions: facts are not rules; a rule's arity is its number of body
// literals (an aggregate counts as one); the unary/binary/ternary buckets
// partition the normal rules only, so choice rules have no arity bucket;
// constraints containing an aggregate are "other"; reach atoms range over
// all nodes.
struct StaticCounts {
  std::size_t rules = 0;
  std::size_t constraints = 0;
  std::size_t choice_rules = 0;
  std::size_t normal_rules = 0;
  std::size_t cardinality_rules = 0;
  std::size_t unary_rules = 0;
  std::size_t binary_rules = 0;
  std::size_t ternary_rules = 0;
  std::size_t binary_constraints = 0;
  std::size_t ternary_constraints = 0;
  std::size_t other_constraints = 0;
  std::size_t problem_variables = 0;
  std::size_t assigned_problem_variables = 0;
  std::size_t free_problem_variables = 0;

  friend bool operator==(const StaticCounts&, const StaticCounts&) = default;
};

// Closed-form counts, with n nodes, a arcs, d1 = out-degree of node 1.
//
//   selection part                 choice          constraints (other)
//   paired exact choice            2n              0
//   open choice + constraints      n               2n
//   aggregate count constraints    a               2n
//
//   reach part      unary normal   binary normal   constraints           reach atoms
//   pairwise        a              n*a             n^2 ternary           n^2
//   root            d1             a               n binary              n
//
// Atoms: node (n) and link (a) facts are assigned; hcyc (a) and reach are free.
inline StaticCounts static_counts(EncodingId enc, const DirectedGraph& graph) {
  const EncodingSpec& spec = encoding(enc);
  const std::size_t n = graph.node_count();
  const std::size_t a = graph.arc_count();
  const std::size_t d1 = n >= 1 ? graph.out_degree(1) : 0;

  StaticCounts c;
  switch (spec.selection_style) {
    case SelectionStyle::PairedExactChoice:
      c.choice_rules = 2 * n;
      break;
    case SelectionStyle::OpenChoiceWithConstraints:
      c.choice_rules = n;
      c.other_constraints = 2 * n;
      break;
    case SelectionStyle::AggregateCountConstraints:
      c.choice_rules = a;
      c.other_constraints = 2 * n;
      break;
  }

  std::size_t reach_atoms = 0;
  if (spec.reach_style == ReachStyle::PairwiseReach) {
    c.unary_rules = a;
    c.binary_rules = n * a;
    c.normal_rules = a + n * a;
    c.ternary_constraints = n * n;
    reach_atoms = n * n;
  } else {
    c.unary_rules = d1;
    c.binary_rules = a;
    c.normal_rules = d1 + a;
    c.binary_constraints = n;
    reach_atoms = n;
  }

  c.rules = c.normal_rules + c.choice_rules + c.cardinality_rules;
  c.constraints = c.binary_constraints + c.ternary_constraints + c.other_constraints;
  c.assigned_problem_variables = n + a;
  c.free_problem_variables = a + reach_atoms;
  c.problem_variables = c.assigned_problem_variables + c.free_problem_variables;
  return c;
}

}  // namespace encsel
