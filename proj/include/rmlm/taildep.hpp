#pragma once

// Tail dependence matrices: evaluation from standardized MLCMs, the
// complement of the χ-graph and its maximum cliques, λ/μ representations,
// and the characterization of TDMs of recursive max-weighted models.

#include "rmlm/core.hpp"
#include "rmlm/graph.hpp"
#include "rmlm/mlcm.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rmlm {

/// Symmetric matrix with unit diagonal and entries in [0, 1]. Entries in
/// (0, tol.zero] are rejected as ill-conditioned, so after construction an
/// entry is either exactly zero or clearly positive.
class TailDepMatrix {
 public:
  explicit TailDepMatrix(Matrix chi, const Tolerance& tol = {}) : chi_(std::move(chi)) {
    detail::require_square(chi_, "tail dependence matrix");
    const auto d = chi_.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
      detail::require(tol.close(chi_(i, i), 1.0), "diagonal entry " + entry_label(Node(i), Node(i)) +
                                                      " is " + format_double(chi_(i, i)) + ", expected 1");
      chi_(i, i) = 1.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i == j) continue;
        const double x = chi_(i, j);
        detail::require(x >= 0 && x <= 1, "entry " + entry_label(Node(i), Node(j)) + " = " +
                                              format_double(x) + " is outside [0, 1]");
        detail::require(tol.close(x, chi_(j, i)), "matrix is not symmetric at " +
                                                      entry_label(Node(i), Node(j)) + ": " +
                                                      format_double(x) + " vs " + format_double(chi_(j, i)));
        if (x > 0 && x <= tol.zero)
          throw IllConditioned("entry " + entry_label(Node(i), Node(j)) + " = " + format_double(x) +
                               " is too close to zero to classify");
      }
    }
  }

  [[nodiscard]] const Matrix& matrix() const { return chi_; }
  [[nodiscard]] std::size_t size() const { return std::size_t(chi_.rows()); }
  [[nodiscard]] double operator()(Node i, Node j) const { return chi_(Eigen::Index(i), Eigen::Index(j)); }
  [[nodiscard]] bool positive(Node i, Node j) const { return (*this)(i, j) > 0; }

 private:
  Matrix chi_;
};

/// χ(i, j) = Σ_k min(b̄_ki, b̄_kj).
inline TailDepMatrix tdm_from_std_mlcm(const StdMlcMatrix& bbar) {
  const auto d = Eigen::Index(bbar.size());
  const Matrix& b = bbar.matrix();
  Matrix chi = Matrix::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double s = b.col(i).cwiseMin(b.col(j)).sum();
      chi(i, j) = chi(j, i) = s;
    }
  return TailDepMatrix(std::move(chi));
}

/// sgn(χ) = sgn(RᵀR).
inline bool independence_pattern_check(const TailDepMatrix& chi, const ReachMatrix& r) {
  detail::require(chi.size() == r.size(), "TDM has " + std::to_string(chi.size()) +
                                              " nodes but the reachability matrix has " +
                                              std::to_string(r.size()));
  for (Node i = 0; i < chi.size(); ++i)
    for (Node j = 0; j < chi.size(); ++j)
      if (chi.positive(i, j) != (r.common_ancestor_count(i, j) > 0)) return false;
  return true;
}

/// Undirected graph with an edge {i, j} iff χ(i, j) = 0.
class ChiComplementGraph {
 public:
  explicit ChiComplementGraph(const TailDepMatrix& chi) : adj_(chi.size()) {
    for (Node i = 0; i < chi.size(); ++i)
      for (Node j = 0; j < chi.size(); ++j)
        if (i != j && !chi.positive(i, j)) adj_[i].push_back(j);
  }
  [[nodiscard]] std::size_t size() const { return adj_.size(); }
  [[nodiscard]] const NodeSet& neighbors(Node i) const { return adj_.at(i); }
  [[nodiscard]] bool adjacent(Node i, Node j) const { return detail::contains(adj_.at(i), j); }

 private:
  std::vector<NodeSet> adj_;
};

namespace detail {

inline NodeSet intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline NodeSet minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Bron–Kerbosch with pivoting, keeping only cliques of the largest size seen.
inline void bron_kerbosch(const ChiComplementGraph& g, NodeSet& r, NodeSet p, NodeSet x,
                          std::vector<NodeSet>& best) {
  const std::size_t best_size = best.empty() ? 0 : best.front().size();
  if (r.size() + p.size() < best_size) return;
  if (p.empty()) {
    if (!x.empty()) return;
    if (r.size() > best_size) best.clear();
    NodeSet clique = r;
    std::sort(clique.begin(), clique.end());
    best.push_back(std::move(clique));
    return;
  }
  Node pivot = p.front();
  std::size_t pivot_degree = 0;
  for (const NodeSet* s : {&p, &x})
    for (Node u : *s) {
      const std::size_t deg = intersect(p, g.neighbors(u)).size();
      if (deg > pivot_degree || (deg == pivot_degree && u < pivot)) {
        pivot = u;
        pivot_degree = deg;
      }
    }
  for (Node v : minus(p, g.neighbors(pivot))) {
    r.push_back(v);
    bron_kerbosch(g, r, intersect(p, g.neighbors(v)), intersect(x, g.neighbors(v)), best);
    r.pop_back();
    p.erase(std::lower_bound(p.begin(), p.end(), v));
    x.insert(std::lower_bound(x.begin(), x.end(), v), v);
  }
}

}  // namespace detail

/// All maximum-cardinality cliques of the complement of the χ-graph, each
/// ascending, listed lexicographically.
inline std::vector<NodeSet> maximum_chi_cliques(const TailDepMatrix& chi) {
  const ChiComplementGraph g(chi);
  NodeSet all(chi.size());
  for (Node v = 0; v < all.size(); ++v) all[v] = v;
  std::vector<NodeSet> best;
  NodeSet r;
  detail::bron_kerbosch(g, r, all, {}, best);
  std::sort(best.begin(), best.end());
  return best;
}

inline bool is_chi_clique(const TailDepMatrix& chi, const NodeSet& w) {
  for (Node a : w) {
    if (a >= chi.size()) return false;
    for (Node b : w)
      if (a != b && chi.positive(a, b)) return false;
  }
  return true;
}

namespace detail {

inline void require_clique(const TailDepMatrix& chi, const NodeSet& w) {
  require(!w.empty() && std::is_sorted(w.begin(), w.end()) &&
              std::adjacent_find(w.begin(), w.end()) == w.end(),
          "node set must be non-empty, ascending and duplicate-free");
  for (Node a : w)
    require(a < chi.size(), "node " + std::to_string(a + 1) + " is outside 1.." + std::to_string(chi.size()));
  for (Node a : w)
    for (Node b : w)
      if (a < b && chi.positive(a, b))
        throw InvalidInput("not a χ-clique: χ" + entry_label(a, b) + " = " + format_double(chi(a, b)) + " > 0");
}

}  // namespace detail

/// Necessary condition for W to be the initial node set of a model with
/// TDM χ: χ(i, j) >= Σ_{k∈W} min(χ(k, i), χ(k, j)) for all i, j outside W.
inline bool clique_initial_filter(const TailDepMatrix& chi, const NodeSet& w, const Tolerance& tol = {}) {
  detail::require_clique(chi, w);
  for (Node i = 0; i < chi.size(); ++i) {
    if (detail::contains(w, i)) continue;
    for (Node j = i; j < chi.size(); ++j) {
      if (detail::contains(w, j)) continue;
      double bound = 0.0;
      for (Node k : w) bound += std::min(chi(k, i), chi(k, j));
      if (!tol.at_least(chi(i, j), bound)) return false;
    }
  }
  return true;
}

using Coefficients = std::map<Node, double>;

/// λ_jk = 1 − Σ_{ℓ∈de(k)∩an(j)} λ_jℓ for every k in an(j).
inline Coefficients lambda_coefficients(const Dag& g, Node j) {
  const ReachMatrix r = reachability_matrix(g);
  const NodeSet an = ancestral_sets(g, j).an;
  Coefficients lambda;
  // Reverse topological order puts every ℓ in de(k) before k.
  auto topo = g.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const Node k = *it;
    if (!detail::contains(an, k)) continue;
    double v = 1.0;
    for (Node l : an)
      if (l != k && r(k, l)) v -= lambda.at(l);
    lambda[k] = v;
  }
  return lambda;
}

/// b̄_ji = χ(j, i) − Σ_{k∈an(j)} λ_jk χ(k, i), for j in An(i).
inline double lambda_representation(const Dag& g, const TailDepMatrix& chi, Node j, Node i) {
  detail::require(chi.size() == g.size(), "TDM and DAG sizes differ");
  const AncestralSets s = ancestral_sets(g, i);
  detail::require(detail::contains(s.An, j), "node " + std::to_string(j + 1) + " is not in An(" +
                                                 std::to_string(i + 1) + ")");
  double v = chi(j, i);
  for (const auto& [k, lambda] : lambda_coefficients(g, j)) v -= lambda * chi(k, i);
  return v;
}

/// Nodes of An(i) ∩ An(j) with no descendant inside that set.
inline NodeSet lowest_common_ancestors(const Dag& g, Node i, Node j) {
  const ReachMatrix r = reachability_matrix(g);
  const NodeSet common = detail::intersect(ancestral_sets(g, i).An, ancestral_sets(g, j).An);
  NodeSet out;
  for (Node k : common) {
    bool lowest = true;
    for (Node l : common)
      if (l != k && r(k, l)) lowest = false;
    if (lowest) out.push_back(k);
  }
  return out;
}

/// μ_ij,k = 1 − Σ_{ℓ∈de(k)∩An(i)∩An(j)} μ_ij,ℓ for k in An(i) ∩ An(j).
inline Coefficients mu_coefficients(const Dag& g, Node i, Node j) {
  const ReachMatrix r = reachability_matrix(g);
  const NodeSet common = detail::intersect(ancestral_sets(g, i).An, ancestral_sets(g, j).An);
  Coefficients mu;
  auto topo = g.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const Node k = *it;
    if (!detail::contains(common, k)) continue;
    double v = 1.0;
    for (Node l : common)
      if (l != k && r(k, l)) v -= mu.at(l);
    mu[k] = v;
  }
  return mu;
}

struct MuRepresentation {
  double value = 0.0;  // Σ μ_ij,k min(χ(k, i), χ(k, j))
  Coefficients coefficients;
  NodeSet lca;
};

inline MuRepresentation mu_representation(const Dag& g, const TailDepMatrix& chi, Node i, Node j) {
  detail::require(chi.size() == g.size(), "TDM and DAG sizes differ");
  MuRepresentation out;
  out.coefficients = mu_coefficients(g, i, j);
  out.lca = lowest_common_ancestors(g, i, j);
  for (const auto& [k, mu] : out.coefficients) out.value += mu * std::min(chi(k, i), chi(k, j));
  return out;
}

struct RmwmTdmReport {
  bool accepted = false;
  char failed_condition = 0;  // 'a' to 'd' when rejected
  std::string detail;
  std::vector<double> diagonal;         // b̄_ii = 1 − Σ_{k∈an(i)} b̄_kk χ(k, i)
  std::optional<StdMlcMatrix> std_mlcm;  // set when accepted
  explicit operator bool() const { return accepted; }
};

/// Decides whether χ is the TDM of a recursive max-weighted model on `g`.
inline RmwmTdmReport check_rmwm_tdm(const Dag& g, const TailDepMatrix& chi, const Tolerance& tol = {}) {
  detail::require(chi.size() == g.size(), "TDM has " + std::to_string(chi.size()) +
                                              " nodes but the DAG has " + std::to_string(g.size()));
  const std::size_t d = g.size();
  const ReachMatrix r = reachability_matrix(g);
  RmwmTdmReport rep;
  rep.diagonal.assign(d, 0.0);
  for (Node i : g.topological_order()) {
    double v = 1.0;
    for (Node k : r.ancestors(i)) v -= rep.diagonal[k] * chi(k, i);
    rep.diagonal[i] = v;
  }
  auto reject = [&](char c, std::string why) {
    rep.failed_condition = c;
    rep.detail = std::move(why);
    return rep;
  };

  for (Node i = 0; i < d; ++i)
    for (Node j = i + 1; j < d; ++j)
      if (chi.positive(i, j) != (r.common_ancestor_count(i, j) > 0))
        return reject('a', "χ" + entry_label(i, j) + " = " + format_double(chi(i, j)) +
                               (chi.positive(i, j) ? " is positive but the nodes share no ancestor"
                                                   : " is zero but the nodes share an ancestor"));
  for (Node i = 0; i < d; ++i)
    if (!tol.greater(rep.diagonal[i], 0.0))
      return reject('b', "diagonal coefficient of node " + std::to_string(i + 1) + " is " +
                             format_double(rep.diagonal[i]));
  for (Node i = 0; i < d; ++i)
    for (Node j : r.ancestors(i))
      for (Node k : g.parents(i)) {
        if (k == j || !r(j, k)) continue;
        const double product = chi(j, k) * chi(k, i);
        if (!tol.close(chi(j, i), product))
          return reject('c', "χ" + entry_label(j, i) + " = " + format_double(chi(j, i)) + " but χ" +
                                 entry_label(j, k) + "·χ" + entry_label(k, i) + " = " + format_double(product));
      }
  for (Node i = 0; i < d; ++i)
    for (Node j = i + 1; j < d; ++j) {
      if (r(i, j) || r(j, i) || r.common_ancestor_count(i, j) == 0) continue;
      double sum = 0.0;
      for (Node k = 0; k < d; ++k)
        if (r(k, i) && r(k, j)) sum += rep.diagonal[k] * std::min(chi(k, i), chi(k, j));
      if (!tol.close(chi(i, j), sum))
        return reject('d', "χ" + entry_label(i, j) + " = " + format_double(chi(i, j)) +
                               " but the ancestor sum gives " + format_double(sum));
    }

  const auto dd = Eigen::Index(d);
  Matrix b = Matrix::Zero(dd, dd);
  for (Node i = 0; i < d; ++i) {
    b(Eigen::Index(i), Eigen::Index(i)) = rep.diagonal[i];
    for (Node j : r.ancestors(i)) b(Eigen::Index(j), Eigen::Index(i)) = rep.diagonal[j] * chi(j, i);
  }
  rep.std_mlcm.emplace(std::move(b), tol);
  rep.accepted = true;
  return rep;
}

}  // namespace rmlm
