#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "encsel/errors.hpp"

namespace encsel {

// Nodes are 1-based and contiguous within a graph.
using NodeId = std::uint32_t;

struct Arc {
  NodeId from = 0;
  NodeId to = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

inline std::string to_string(const Arc& arc) {
  return "(" + std::to_string(arc.from) + "," + std::to_string(arc.to) + ")";
}

// Immutable directed graph over nodes 1..n. No self-loops, no duplicate arcs.
// Adjacency lists are kept sorted so every traversal visits successors in
// ascending NodeId order.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  DirectedGraph(std::size_t node_count, std::vector<Arc> arcs) : node_count_(node_count), arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end());
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
      const Arc& a = arcs_[i];
      if (a.from < 1 || a.from > node_count_ || a.to < 1 || a.to > node_count_) {
        throw ValidationError("arc " + to_string(a) + " has an endpoint outside 1.." + std::to_string(node_count_));
      }
      if (a.from == a.to) {
        throw ValidationError("self-loop " + to_string(a) + " is not allowed");
      }
      if (i > 0 && arcs_[i - 1] == a) {
        throw ValidationError("duplicate arc " + to_string(a));
      }
    }
    out_.assign(node_count_ + 1, {});
    in_.assign(node_count_ + 1, {});
    for (const Arc& a : arcs_) {
      out_[a.from].push_back(a.to);
      in_[a.to].push_back(a.from);
    }
    for (auto& preds : in_) std::sort(preds.begin(), preds.end());
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t arc_count() const noexcept { return arcs_.size(); }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  const std::vector<NodeId>& successors(NodeId v) const { return out_.at(v); }
  const std::vector<NodeId>& predecessors(NodeId v) const { return in_.at(v); }
  std::size_t out_degree(NodeId v) const { return out_.at(v).size(); }
  std::size_t in_degree(NodeId v) const { return in_.at(v).size(); }

  bool has_arc(NodeId from, NodeId to) const {
    if (from < 1 || from > node_count_) return false;
    const auto& s = out_[from];
    return std::binary_search(s.begin(), s.end(), to);
  }

  // True when every arc has its reverse.
  bool is_symmetric() const {
    return std::all_of(arcs_.begin(), arcs_.end(), [this](const Arc& a) { return has_arc(a.to, a.from); });
  }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.node_count_ == b.node_count_ && a.arcs_ == b.arcs_;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
};

// Builds a graph from undirected edges, realizing each as an arc pair.
inline DirectedGraph symmetric_graph(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<Arc> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    arcs.push_back({u, v});
    arcs.push_back({v, u});
  }
  return DirectedGraph(node_count, std::move(arcs));
}

namespace detail {

class FactScanner {
 public:
  explicit FactScanner(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string identifier() {
    skip_space();
    std::string id;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      id.push_back(text_[pos_]);
      advance();
    }
    if (id.empty()) fail("expected a predicate name");
    return id;
  }

  std::int64_t integer() {
    skip_space();
    std::size_t start = pos_;
    std::int64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > (std::int64_t{1} << 31)) fail("integer out of range");
      advance();
    }
    if (pos_ == start) fail("expected a non-negative integer");
    return value;
  }

  void expect(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
    for (std::size_t i = 0; i < token.size(); ++i) advance();
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) return false;
    for (std::size_t i = 0; i < token.size(); ++i) advance();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column_); }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace detail

// Parses `node(a..b).`, `node(k).` and `link(x,y).` facts. `%` starts a line
// comment. Declared nodes must form the contiguous range 1..n.
inline DirectedGraph parse_facts(std::string_view text) {
  detail::FactScanner scan(text);
  std::set<std::int64_t> nodes;
  struct PendingArc {
    Arc arc;
    std::size_t line, column;
  };
  std::vector<PendingArc> links;

  while (!scan.at_end()) {
    std::size_t line = scan.line(), column = scan.column();
    std::string pred = scan.identifier();
    if (pred == "node") {
      scan.expect("(");
      std::int64_t lo = scan.integer();
      std::int64_t hi = lo;
      if (scan.accept("..")) hi = scan.integer();
      scan.expect(")");
      scan.expect(".");
      if (lo < 1) throw ParseError("node ids start at 1", line, column);
      for (std::int64_t v = lo; v <= hi; ++v) nodes.insert(v);
    } else if (pred == "link") {
      scan.expect("(");
      std::int64_t x = scan.integer();
      scan.expect(",");
      std::int64_t y = scan.integer();
      scan.expect(")");
      scan.expect(".");
      links.push_back({{static_cast<NodeId>(x), static_cast<NodeId>(y)}, line, column});
    } else {
      throw ParseError("unknown predicate '" + pred + "'", line, column);
    }
  }

  std::size_t n = nodes.size();
  if (n > 0 && (*nodes.begin() != 1 || *nodes.rbegin() != static_cast<std::int64_t>(n))) {
    throw ValidationError("declared nodes are not the contiguous range 1.." + std::to_string(n));
  }
  std::vector<Arc> arcs;
  arcs.reserve(links.size());
  for (const auto& l : links) {
    if (l.arc.from < 1 || l.arc.from > n || l.arc.to < 1 || l.arc.to > n) {
      throw ValidationError("link" + to_string(l.arc) + " at " + std::to_string(l.line) + ":" +
                            std::to_string(l.column) + " refers to an undeclared node");
    }
    arcs.push_back(l.arc);
  }
  return DirectedGraph(n, std::move(arcs));
}

// `node(1..n).` followed by one `link(x,y).` per arc in ascending order.
inline std::string emit_facts(const DirectedGraph& graph) {
  std::string out = "node(1.." + std::to_string(graph.node_count()) + ").\n";
  for (const Arc& a : graph.arcs()) {
    out += "link(" + std::to_string(a.from) + "," + std::to_string(a.to) + ").\n";
  }
  return out;
}

}  // namespace encsel
