#pragma once

// Directed acyclic graphs and the pure graph procedures the model layer
// builds on: ancestral sets, reachability, causal orderings and the
// transitive reduction.

#include "rmlm/core.hpp"

#include <compare>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rmlm {

struct Edge {
  Node from;
  Node to;
  auto operator<=>(const Edge&) const = default;
};

/// Immutable DAG on nodes {0, ..., d-1}. Construction rejects cycles,
/// self-loops, duplicate edges and out-of-range endpoints.
class Dag {
 public:
  explicit Dag(std::size_t d, std::vector<Edge> edges = {}) : d_(d), edges_(std::move(edges)) {
    detail::require(d_ > 0, "a DAG needs at least one node");
    std::sort(edges_.begin(), edges_.end());
    parents_.assign(d_, {});
    children_.assign(d_, {});
    for (std::size_t n = 0; n < edges_.size(); ++n) {
      const Edge& e = edges_[n];
      detail::require(e.from < d_ && e.to < d_, "edge " + label(e) + " has an endpoint outside 1.." +
                                                    std::to_string(d_));
      detail::require(e.from != e.to, "self-loop at node " + std::to_string(e.from + 1));
      detail::require(n == 0 || edges_[n - 1] != e, "duplicate edge " + label(e));
      parents_[e.to].push_back(e.from);
      children_[e.from].push_back(e.to);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    topo_ = kahn_order();
    detail::require(topo_.size() == d_, "edge set contains a directed cycle");
  }

  [[nodiscard]] std::size_t size() const { return d_; }
  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  [[nodiscard]] std::span<const Node> parents(Node i) const { return parents_.at(i); }
  [[nodiscard]] std::span<const Node> children(Node i) const { return children_.at(i); }
  [[nodiscard]] bool has_edge(Node k, Node i) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{k, i});
  }
  /// Topological order; among available nodes the smallest index goes first.
  [[nodiscard]] std::span<const Node> topological_order() const { return topo_; }

  [[nodiscard]] NodeSet initial_nodes() const {
    NodeSet out;
    for (Node i = 0; i < d_; ++i)
      if (parents_[i].empty()) out.push_back(i);
    return out;
  }
  [[nodiscard]] NodeSet terminal_nodes() const {
    NodeSet out;
    for (Node i = 0; i < d_; ++i)
      if (children_[i].empty()) out.push_back(i);
    return out;
  }

  friend bool operator==(const Dag& a, const Dag& b) { return a.d_ == b.d_ && a.edges_ == b.edges_; }

 private:
  static std::string label(const Edge& e) {
    return std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1);
  }

  std::vector<Node> kahn_order() const {
    std::vector<std::size_t> indegree(d_);
    for (const Edge& e : edges_) ++indegree[e.to];
    std::priority_queue<Node, std::vector<Node>, std::greater<>> ready;
    for (Node i = 0; i < d_; ++i)
      if (indegree[i] == 0) ready.push(i);
    std::vector<Node> order;
    order.reserve(d_);
    while (!ready.empty()) {
      Node v = ready.top();
      ready.pop();
      order.push_back(v);
      for (Node c : children_[v])
        if (--indegree[c] == 0) ready.push(c);
    }
    return order;
  }

  std::size_t d_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Node>> parents_;
  std::vector<std::vector<Node>> children_;
  std::vector<Node> topo_;
};

struct AncestralSets {
  NodeSet an;  // ancestors
  NodeSet An;  // ancestors and the node itself
  NodeSet pa;  // parents
  NodeSet de;  // descendants
  NodeSet De;  // descendants and the node itself
};

namespace detail {

inline NodeSet reach_from(const Dag& g, Node start, bool forward) {
  std::vector<char> seen(g.size(), 0);
  std::vector<Node> stack{start};
  NodeSet out;
  while (!stack.empty()) {
    Node v = stack.back();
    stack.pop_back();
    for (Node w : forward ? g.children(v) : g.parents(v))
      if (!seen[w]) {
        seen[w] = 1;
        out.push_back(w);
        stack.push_back(w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline NodeSet with(NodeSet s, Node v) {
  s.insert(std::upper_bound(s.begin(), s.end(), v), v);
  return s;
}

}  // namespace detail

inline AncestralSets ancestral_sets(const Dag& g, Node i) {
  detail::require(i < g.size(), "node " + std::to_string(i + 1) + " is outside 1.." +
                                    std::to_string(g.size()));
  AncestralSets s;
  s.an = detail::reach_from(g, i, false);
  s.de = detail::reach_from(g, i, true);
  s.An = detail::with(s.an, i);
  s.De = detail::with(s.de, i);
  auto p = g.parents(i);
  s.pa.assign(p.begin(), p.end());
  return s;
}

/// Reflexive, transitively closed, antisymmetric 0/1 matrix; entry (j, i) is
/// set iff j is an ancestor of i or j == i.
class ReachMatrix {
 public:
  /// Identity pattern: the edgeless DAG on d nodes.
  explicit ReachMatrix(std::size_t d) : d_(d), bits_(d * d, 0) {
    detail::require(d > 0, "reachability matrix needs at least one node");
    for (Node i = 0; i < d; ++i) set(i, i);
  }

  /// Validates the 0/1 pattern of `m` (entries with |x| > zero count as one).
  static ReachMatrix from_pattern(const Matrix& m, double zero = 0.0) {
    detail::require_square(m, "reachability pattern");
    const std::size_t d = std::size_t(m.rows());
    ReachMatrix r(d);
    for (Node j = 0; j < d; ++j)
      for (Node i = 0; i < d; ++i)
        if (std::abs(m(Eigen::Index(j), Eigen::Index(i))) > zero) r.set(j, i);
        else if (i == j) throw InvalidInput("reachability pattern has a zero diagonal entry at node " +
                                            std::to_string(i + 1));
    r.validate();
    return r;
  }

  [[nodiscard]] std::size_t size() const { return d_; }
  [[nodiscard]] bool operator()(Node j, Node i) const { return bits_[j * d_ + i] != 0; }

  [[nodiscard]] NodeSet ancestors(Node i) const {
    NodeSet out;
    for (Node j = 0; j < d_; ++j)
      if (j != i && (*this)(j, i)) out.push_back(j);
    return out;
  }
  [[nodiscard]] NodeSet descendants(Node j) const {
    NodeSet out;
    for (Node i = 0; i < d_; ++i)
      if (j != i && (*this)(j, i)) out.push_back(i);
    return out;
  }
  /// |An(i) ∩ An(j)|, the (i, j) entry of RᵀR.
  [[nodiscard]] std::size_t common_ancestor_count(Node i, Node j) const {
    std::size_t n = 0;
    for (Node k = 0; k < d_; ++k)
      if ((*this)(k, i) && (*this)(k, j)) ++n;
    return n;
  }

  /// The edge-minimal DAG with this reachability (its transitive reduction).
  [[nodiscard]] Dag to_dag() const {
    std::vector<Edge> edges;
    for (Node j = 0; j < d_; ++j)
      for (Node i = 0; i < d_; ++i) {
        if (i == j || !(*this)(j, i)) continue;
        bool through = false;
        for (Node k = 0; k < d_ && !through; ++k)
          through = k != i && k != j && (*this)(j, k) && (*this)(k, i);
        if (!through) edges.push_back({j, i});
      }
    return Dag(d_, std::move(edges));
  }

  [[nodiscard]] Matrix to_matrix() const {
    Matrix m = Matrix::Zero(Eigen::Index(d_), Eigen::Index(d_));
    for (Node j = 0; j < d_; ++j)
      for (Node i = 0; i < d_; ++i) m(Eigen::Index(j), Eigen::Index(i)) = (*this)(j, i) ? 1.0 : 0.0;
    return m;
  }

  friend bool operator==(const ReachMatrix&, const ReachMatrix&) = default;

 private:
  friend ReachMatrix reachability_matrix(const Dag& g);

  void set(Node j, Node i) { bits_[j * d_ + i] = 1; }

  void validate() const {
    for (Node j = 0; j < d_; ++j)
      for (Node i = 0; i < d_; ++i) {
        if (i == j || !(*this)(j, i)) continue;
        if ((*this)(i, j))
          throw InvalidInput("pattern has a cycle: nodes " + std::to_string(j + 1) + " and " +
                             std::to_string(i + 1) + " reach each other");
        for (Node k = 0; k < d_; ++k)
          if ((*this)(i, k) && !(*this)(j, k))
            throw InvalidInput("pattern is not transitively closed: " + std::to_string(j + 1) +
                               " reaches " + std::to_string(i + 1) + " which reaches " +
                               std::to_string(k + 1));
      }
  }

  std::size_t d_;
  std::vector<char> bits_;
};

inline ReachMatrix reachability_matrix(const Dag& g) {
  ReachMatrix r(g.size());
  auto topo = g.topological_order();
  // Ancestor rows accumulate along the topological order.
  for (Node i : topo)
    for (Node p : g.parents(i))
      for (Node j = 0; j < g.size(); ++j)
        if (r(j, p)) r.set(j, i);
  return r;
}

/// Removes every edge k->i for which another k->i path exists.
inline Dag transitive_reduction(const Dag& g) {
  const ReachMatrix r = reachability_matrix(g);
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    bool redundant = false;
    for (Node c : g.children(e.from))
      if (c != e.to && r(c, e.to)) {
        redundant = true;
        break;
      }
    if (!redundant) kept.push_back(e);
  }
  return Dag(g.size(), std::move(kept));
}

/// Bijection from nodes to positions 0..d-1.
class CausalOrdering {
 public:
  /// `sequence[p]` is the node placed at position p.
  static CausalOrdering from_sequence(std::vector<Node> sequence) {
    CausalOrdering o;
    o.sequence_ = std::move(sequence);
    o.rank_.assign(o.sequence_.size(), o.sequence_.size());
    detail::require(!o.sequence_.empty(), "ordering must not be empty");
    for (std::size_t p = 0; p < o.sequence_.size(); ++p) {
      Node v = o.sequence_[p];
      detail::require(v < o.sequence_.size() && o.rank_[v] == o.sequence_.size(),
                      "ordering is not a permutation of 1.." + std::to_string(o.sequence_.size()));
      o.rank_[v] = p;
    }
    return o;
  }
  /// `rank[v]` is the position of node v.
  static CausalOrdering from_ranks(const std::vector<std::size_t>& rank) {
    std::vector<Node> seq(rank.size(), rank.size());
    for (Node v = 0; v < rank.size(); ++v) {
      detail::require(rank[v] < rank.size() && seq[rank[v]] == rank.size(),
                      "ranks are not a permutation of 1.." + std::to_string(rank.size()));
      seq[rank[v]] = v;
    }
    return from_sequence(std::move(seq));
  }
  static CausalOrdering identity(std::size_t d) {
    std::vector<Node> seq(d);
    for (Node v = 0; v < d; ++v) seq[v] = v;
    return from_sequence(std::move(seq));
  }

  [[nodiscard]] std::size_t size() const { return sequence_.size(); }
  [[nodiscard]] std::size_t rank(Node v) const { return rank_.at(v); }
  [[nodiscard]] std::span<const Node> sequence() const { return sequence_; }

  friend bool operator==(const CausalOrdering&, const CausalOrdering&) = default;

 private:
  std::vector<Node> sequence_;
  std::vector<std::size_t> rank_;
};

/// True iff every ancestor precedes its descendants.
inline bool validate_causal_ordering(const Dag& g, const CausalOrdering& sigma) {
  detail::require(sigma.size() == g.size(), "ordering has " + std::to_string(sigma.size()) +
                                                " nodes but the DAG has " + std::to_string(g.size()));
  // Checking edges suffices: ancestor relations are chains of edges.
  for (const Edge& e : g.edges())
    if (sigma.rank(e.from) >= sigma.rank(e.to)) return false;
  return true;
}

inline bool validate_causal_ordering(const ReachMatrix& r, const CausalOrdering& sigma) {
  detail::require(sigma.size() == r.size(), "ordering and reachability sizes differ");
  for (Node j = 0; j < r.size(); ++j)
    for (Node i = 0; i < r.size(); ++i)
      if (i != j && r(j, i) && sigma.rank(j) >= sigma.rank(i)) return false;
  return true;
}

}  // namespace rmlm
