#pragma once

// Recovery of standardized MLCMs from a TDM plus side information, search
// over all models sharing a TDM, and relations between χ-equivalent models.

#include "rmlm/core.hpp"
#include "rmlm/graph.hpp"
#include "rmlm/mlcm.hpp"
#include "rmlm/taildep.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rmlm {

struct IdentifiedModel {
  StdMlcMatrix std_mlcm;
  Dag min_ml_dag;
  NodeSet initial_nodes;
  CausalOrdering ordering_used;
  bool max_weighted = false;
};

struct EnumerationOptions {
  Tolerance tol{};
  std::size_t max_d = 10;
};

namespace detail {

// Rounding noise snaps to zero; anything clearly negative is infeasible.
inline double settle(double x, const Tolerance& tol, Node j, Node i) {
  if (std::abs(x) <= tol.eps) return 0.0;
  if (x < 0)
    throw Infeasible("recursion produced negative coefficient " + format_double(x) + " at " +
                     entry_label(j, i));
  return x;
}

inline void require_positive_diagonal(double x, const Tolerance& tol, Node j) {
  if (!tol.greater(x, 0.0))
    throw Infeasible("recursion produced non-positive diagonal coefficient " + format_double(x) +
                     " at node " + std::to_string(j + 1));
}

inline void require_pattern(const TailDepMatrix& chi, const ReachMatrix& r) {
  if (!independence_pattern_check(chi, r))
    throw Infeasible("sgn(χ) differs from sgn(RᵀR): the TDM cannot come from a model with this reachability");
}

inline std::vector<Node> rows_by_ancestor_count(const ReachMatrix& r) {
  std::vector<Node> rows(r.size());
  std::vector<std::size_t> count(r.size());
  for (Node j = 0; j < r.size(); ++j) {
    rows[j] = j;
    count[j] = r.ancestors(j).size();
  }
  std::stable_sort(rows.begin(), rows.end(), [&](Node a, Node b) { return count[a] < count[b]; });
  return rows;
}

}  // namespace detail

/// Rows in increasing |an(j)|: b̄_ji = χ(j, i) − Σ_{k∈an(j)} min(b̄_ki, b̄_kj)
/// for i in De(j), zero elsewhere.
inline StdMlcMatrix recover_from_reachability(const TailDepMatrix& chi, const ReachMatrix& r,
                                              const Tolerance& tol = {}) {
  detail::require_pattern(chi, r);
  const std::size_t d = chi.size();
  Matrix b = Matrix::Zero(Eigen::Index(d), Eigen::Index(d));
  auto at = [&](Node x, Node y) -> double& { return b(Eigen::Index(x), Eigen::Index(y)); };
  for (Node j : detail::rows_by_ancestor_count(r)) {
    const NodeSet an = r.ancestors(j);
    for (Node i = 0; i < d; ++i) {
      if (!r(j, i)) continue;
      double v = chi(j, i);
      for (Node k : an) v -= std::min(at(k, i), at(k, j));
      at(j, i) = detail::settle(v, tol, j, i);
    }
    detail::require_positive_diagonal(at(j, j), tol, j);
  }
  return StdMlcMatrix(std::move(b), tol);
}

/// Max-weighted variant: b̄_jj = 1 − Σ_{k∈an(j)} b̄_kj and b̄_ji = b̄_jj χ(j, i)
/// for i in de(j).
inline StdMlcMatrix recover_from_reachability_rmwm(const TailDepMatrix& chi, const ReachMatrix& r,
                                                   const Tolerance& tol = {}) {
  detail::require_pattern(chi, r);
  const std::size_t d = chi.size();
  Matrix b = Matrix::Zero(Eigen::Index(d), Eigen::Index(d));
  auto at = [&](Node x, Node y) -> double& { return b(Eigen::Index(x), Eigen::Index(y)); };
  for (Node j : detail::rows_by_ancestor_count(r)) {
    double diag = 1.0;
    for (Node k : r.ancestors(j)) diag -= at(k, j);
    at(j, j) = detail::settle(diag, tol, j, j);
    detail::require_positive_diagonal(at(j, j), tol, j);
    for (Node i : r.descendants(j)) at(j, i) = at(j, j) * chi(j, i);
  }
  return StdMlcMatrix(std::move(b), tol);
}

/// Rows in σ-order: b̄_ji = χ(j, i) − Σ_{σ(k)<σ(j)} min(b̄_ki, b̄_kj) for
/// σ(j) <= σ(i), zero otherwise.
inline StdMlcMatrix recover_from_ordering(const TailDepMatrix& chi, const CausalOrdering& sigma,
                                          const Tolerance& tol = {}) {
  const std::size_t d = chi.size();
  detail::require(sigma.size() == d, "ordering has " + std::to_string(sigma.size()) +
                                         " nodes but the TDM has " + std::to_string(d));
  Matrix b = Matrix::Zero(Eigen::Index(d), Eigen::Index(d));
  auto at = [&](Node x, Node y) -> double& { return b(Eigen::Index(x), Eigen::Index(y)); };
  auto seq = sigma.sequence();
  for (std::size_t p = 0; p < d; ++p) {
    const Node j = seq[p];
    for (std::size_t q = p; q < d; ++q) {
      const Node i = seq[q];
      double v = chi(j, i);
      for (std::size_t s = 0; s < p; ++s) v -= std::min(at(seq[s], i), at(seq[s], j));
      at(j, i) = detail::settle(v, tol, j, i);
    }
    detail::require_positive_diagonal(at(j, j), tol, j);
  }
  return StdMlcMatrix(std::move(b), tol);
}

namespace detail {

inline std::vector<std::size_t> initial_layer_sizes(const TailDepMatrix& chi, const NodeSet& v0) {
  std::vector<std::size_t> layer(chi.size(), 0);
  for (Node j = 0; j < chi.size(); ++j)
    for (Node k : v0)
      if (chi.positive(k, j)) ++layer[j];
  return layer;
}

}  // namespace detail

/// Nodes layered by |V₀^j| = |{k ∈ V₀ : χ(k, j) > 0}| ascending; within a
/// layer by max_{ℓ∈V₀} χ(ℓ, j) descending, then by index.
inline CausalOrdering ordering_from_initials(const TailDepMatrix& chi, const NodeSet& v0) {
  detail::require_clique(chi, v0);
  const auto layer = detail::initial_layer_sizes(chi, v0);
  std::vector<double> top(chi.size(), 0.0);
  for (Node j = 0; j < chi.size(); ++j)
    for (Node l : v0) top[j] = std::max(top[j], chi(l, j));
  std::vector<Node> seq(chi.size());
  for (Node j = 0; j < seq.size(); ++j) seq[j] = j;
  std::stable_sort(seq.begin(), seq.end(), [&](Node a, Node b) {
    if (layer[a] != layer[b]) return layer[a] < layer[b];
    return top[a] > top[b];
  });
  return CausalOrdering::from_sequence(std::move(seq));
}

inline StdMlcMatrix recover_rmwm_from_initials(const TailDepMatrix& chi, const NodeSet& v0,
                                               const Tolerance& tol = {}) {
  return recover_from_ordering(chi, ordering_from_initials(chi, v0), tol);
}

namespace detail {

inline IdentifiedModel make_identified(StdMlcMatrix bbar, CausalOrdering sigma, const Tolerance& tol) {
  Dag g = minimum_ml_dag(bbar, tol);
  NodeSet v0 = g.initial_nodes();
  const bool mw = is_rmwm_mlcm(bbar, tol).holds;
  return IdentifiedModel{std::move(bbar), std::move(g), std::move(v0), std::move(sigma), mw};
}

class ModelCollector {
 public:
  explicit ModelCollector(const Tolerance& tol) : tol_(tol) {}

  bool add(IdentifiedModel m) {
    std::vector<long long> key;
    const Matrix& b = m.std_mlcm.matrix();
    key.reserve(std::size_t(b.size()) * 2);
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        key.push_back(b(r, c) > 0 ? 1 : 0);
        key.push_back(std::llround(b(r, c) / tol_.eps));
      }
    if (!seen_.insert(std::move(key)).second) return false;
    reach_.push_back(sign_pattern(b));
    models_.push_back(std::move(m));
    return true;
  }

  [[nodiscard]] bool covered(const CausalOrdering& sigma) const {
    for (const ReachMatrix& r : reach_)
      if (validate_causal_ordering(r, sigma)) return true;
    return false;
  }

  std::vector<IdentifiedModel> take() && {
    std::sort(models_.begin(), models_.end(), [](const IdentifiedModel& a, const IdentifiedModel& b) {
      if (a.initial_nodes != b.initial_nodes) return a.initial_nodes < b.initial_nodes;
      const Matrix& x = a.std_mlcm.matrix();
      const Matrix& y = b.std_mlcm.matrix();
      return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
    });
    return std::move(models_);
  }

 private:
  Tolerance tol_;
  std::set<std::vector<long long>> seen_;
  std::vector<ReachMatrix> reach_;
  std::vector<IdentifiedModel> models_;
};

// Depth-first search over orderings that start with W (ascending) and respect
// the |W^j| layers. Rows of the recursion are computed as nodes are placed,
// so a prefix that already forces a negative coefficient, a non-positive
// diagonal, a broken transitivity or a violated triangle inequality
// b̄_ji >= b̄_jk b̄_ki / b̄_kk cuts its whole subtree.
class OrderingSearch {
 public:
  OrderingSearch(const TailDepMatrix& chi, const NodeSet& w, const Tolerance& tol, ModelCollector& out)
      : chi_(chi), tol_(tol), out_(out), d_(chi.size()),
        layer_(initial_layer_sizes(chi, w)), placed_(d_, 0),
        b_(Matrix::Zero(Eigen::Index(d_), Eigen::Index(d_))) {
    for (Node j : w) forced_.push_back(j);
  }

  void run() { descend(); }

 private:
  double& at(Node x, Node y) { return b_(Eigen::Index(x), Eigen::Index(y)); }

  bool place(Node j) {
    for (Node i = 0; i < d_; ++i) {
      if (placed_[i]) {
        at(j, i) = 0.0;
        continue;
      }
      double v = chi_(j, i);
      for (Node k : seq_) v -= std::min(at(k, i), at(k, j));
      if (std::abs(v) <= tol_.eps) v = 0.0;
      if (v < 0) return false;
      at(j, i) = v;
    }
    if (!tol_.greater(at(j, j), 0.0)) return false;
    for (Node p : seq_) {
      if (at(p, j) <= 0) continue;
      for (Node i = 0; i < d_; ++i) {
        if (placed_[i] || i == j || at(j, i) <= 0) continue;
        if (at(p, i) <= 0) return false;
        if (!tol_.at_least(at(p, i), at(p, j) * at(j, i) / at(j, j))) return false;
      }
    }
    return true;
  }

  void push(Node j) {
    placed_[j] = 1;
    seq_.push_back(j);
  }
  void pop() {
    placed_[seq_.back()] = 0;
    seq_.pop_back();
  }

  void descend() {
    if (seq_.size() == d_) {
      leaf();
      return;
    }
    if (seq_.size() < forced_.size()) {
      const Node j = forced_[seq_.size()];
      if (!place(j)) return;
      push(j);
      descend();
      pop();
      return;
    }
    std::size_t lowest = SIZE_MAX;
    for (Node i = 0; i < d_; ++i)
      if (!placed_[i]) lowest = std::min(lowest, layer_[i]);
    for (Node j = 0; j < d_; ++j) {
      if (placed_[j] || layer_[j] != lowest) continue;
      if (!place(j)) continue;
      push(j);
      descend();
      pop();
    }
  }

  void leaf() {
    CausalOrdering sigma = CausalOrdering::from_sequence(seq_);
    if (out_.covered(sigma)) return;
    StdMlcMatrix bbar(b_, tol_);
    if (!is_mlcm(bbar, tol_)) return;
    out_.add(make_identified(std::move(bbar), std::move(sigma), tol_));
  }

  const TailDepMatrix& chi_;
  Tolerance tol_;
  ModelCollector& out_;
  std::size_t d_;
  std::vector<std::size_t> layer_;
  std::vector<char> placed_;
  std::vector<Node> seq_;
  std::vector<Node> forced_;
  Matrix b_;
};

}  // namespace detail

/// Every standardized MLCM of a recursive max-linear model with TDM χ.
/// Empty iff no such model exists. Refuses d > opts.max_d.
inline std::vector<IdentifiedModel> enumerate_all(const TailDepMatrix& chi, const EnumerationOptions& opts = {}) {
  if (chi.size() > opts.max_d)
    throw CapExceeded("enumeration over all orderings is capped at d = " + std::to_string(opts.max_d) +
                      ", got d = " + std::to_string(chi.size()));
  detail::ModelCollector out(opts.tol);
  for (const NodeSet& w : maximum_chi_cliques(chi)) {
    if (!clique_initial_filter(chi, w, opts.tol)) continue;
    detail::OrderingSearch(chi, w, opts.tol, out).run();
  }
  return std::move(out).take();
}

/// Every standardized MLCM of a recursive max-weighted model with TDM χ,
/// one candidate per maximum χ-clique.
inline std::vector<IdentifiedModel> enumerate_all_rmwm(const TailDepMatrix& chi, const Tolerance& tol = {}) {
  detail::ModelCollector out(tol);
  for (const NodeSet& w : maximum_chi_cliques(chi)) {
    if (!clique_initial_filter(chi, w, tol)) continue;
    CausalOrdering sigma = ordering_from_initials(chi, w);
    std::optional<StdMlcMatrix> bbar;
    try {
      bbar.emplace(recover_from_ordering(chi, sigma, tol));
      if (!is_rmwm_mlcm(*bbar, tol)) continue;
    } catch (const Infeasible&) {
      continue;
    } catch (const InvalidInput&) {
      continue;  // sign pattern is not a reachability matrix
    }
    out.add(detail::make_identified(std::move(*bbar), std::move(sigma), tol));
  }
  return std::move(out).take();
}

/// φ(j) for j in V₀: the unique node of Ṽ₀ with χ(j, φ(j)) > 0.
using InitialBijection = std::map<Node, Node>;

inline InitialBijection initial_bijection(const TailDepMatrix& chi, const NodeSet& v0, const NodeSet& v0_tilde) {
  detail::require_clique(chi, v0);
  detail::require_clique(chi, v0_tilde);
  if (v0.size() != v0_tilde.size())
    throw Infeasible("initial node sets differ in size (" + std::to_string(v0.size()) + " vs " +
                     std::to_string(v0_tilde.size()) + ")");
  InitialBijection phi;
  std::set<Node> image;
  for (Node j : v0) {
    NodeSet hits;
    for (Node i : v0_tilde)
      if (chi.positive(j, i)) hits.push_back(i);
    if (hits.size() != 1)
      throw Infeasible("node " + std::to_string(j + 1) + " has " + std::to_string(hits.size()) +
                       " tail-dependent partners in the second initial set, expected exactly one");
    if (!image.insert(hits.front()).second)
      throw Infeasible("node " + std::to_string(hits.front() + 1) + " is matched twice");
    phi[j] = hits.front();
  }
  return phi;
}

struct EquivalenceReport {
  InitialBijection phi;
  std::vector<std::string> violations;
  [[nodiscard]] bool satisfied() const { return violations.empty(); }
  explicit operator bool() const { return satisfied(); }
};

/// Structural constraints between the DAGs of two χ-equivalent max-weighted
/// models with initial sets V₀ (of `g`) and Ṽ₀ (of `g_tilde`): every moved
/// initial node j must map to a terminal node φ(j) of `g`, and every j->φ(j)
/// path in the transitive reduction of `g` must appear reversed in the
/// transitive reduction of `g_tilde`.
inline EquivalenceReport rmwm_equivalence_constraints(const TailDepMatrix& chi, const NodeSet& v0,
                                                      const NodeSet& v0_tilde, const Dag& g,
                                                      const Dag& g_tilde) {
  detail::require(g.size() == chi.size() && g_tilde.size() == chi.size(), "TDM and DAG sizes differ");
  EquivalenceReport rep;
  try {
    rep.phi = initial_bijection(chi, v0, v0_tilde);
  } catch (const Infeasible& e) {
    rep.violations.push_back(std::string("no initial bijection: ") + e.what());
    return rep;
  }
  const Dag tr = transitive_reduction(g);
  const Dag tr_tilde = transitive_reduction(g_tilde);
  const ReachMatrix r = reachability_matrix(g);
  const NodeSet terminal = g.terminal_nodes();
  for (const auto& [j, target] : rep.phi) {
    if (j == target) continue;
    if (!detail::contains(terminal, target))
      rep.violations.push_back("node " + std::to_string(target + 1) + " = φ(" + std::to_string(j + 1) +
                               ") is not terminal in the first DAG");
    if (!r(j, target)) {
      rep.violations.push_back("the first DAG has no path from " + std::to_string(j + 1) + " to " +
                               std::to_string(target + 1));
      continue;
    }
    // An edge u->v lies on some j->φ(j) path iff j reaches u and v reaches φ(j).
    for (const Edge& e : tr.edges())
      if (r(j, e.from) && r(e.to, target) && !tr_tilde.has_edge(e.to, e.from))
        rep.violations.push_back("edge " + std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1) +
                                 " on a path from " + std::to_string(j + 1) + " to " +
                                 std::to_string(target + 1) + " is not reversed in the second transitive reduction");
  }
  return rep;
}

}  // namespace rmlm
