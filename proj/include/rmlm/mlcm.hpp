#pragma once

// Max-linear coefficient matrices: path analysis in the max-times semiring,
// standardization, minimum ML DAGs and validity checks.

#include "rmlm/core.hpp"
#include "rmlm/graph.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rmlm {

/// Recursive max-linear model. `coefficients(k, i)` holds the edge weight
/// c_ki for every edge k->i and `coefficients(i, i)` the noise scale c_ii;
/// every other entry is zero.
class WeightedModel {
 public:
  WeightedModel(Dag dag, Matrix coefficients, double alpha)
      : dag_(std::move(dag)), c_(std::move(coefficients)), alpha_(alpha) {
    detail::require_square(c_, "coefficient matrix");
    detail::require(std::size_t(c_.rows()) == dag_.size(),
                    "coefficient matrix is " + std::to_string(c_.rows()) + "x" +
                        std::to_string(c_.cols()) + " but the DAG has " +
                        std::to_string(dag_.size()) + " nodes");
    detail::require(std::isfinite(alpha_) && alpha_ > 0, "tail index must be finite and positive");
    for (Node k = 0; k < dag_.size(); ++k)
      for (Node i = 0; i < dag_.size(); ++i) {
        const double c = c_(Eigen::Index(k), Eigen::Index(i));
        if (k == i || dag_.has_edge(k, i))
          detail::require(c > 0, (k == i ? "noise scale " : "edge weight ") + entry_label(k, i) +
                                     " must be positive");
        else
          detail::require(c == 0, "coefficient " + entry_label(k, i) + " has no edge");
      }
  }

  [[nodiscard]] const Dag& dag() const { return dag_; }
  [[nodiscard]] const Matrix& coefficients() const { return c_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] std::size_t size() const { return dag_.size(); }
  [[nodiscard]] double weight(Node k, Node i) const { return c_(Eigen::Index(k), Eigen::Index(i)); }

 private:
  Dag dag_;
  Matrix c_;
  double alpha_;
};

/// ML coefficient matrix B: nonnegative, positive diagonal, and a sign
/// pattern that is a reachability matrix.
class MlcMatrix {
 public:
  explicit MlcMatrix(Matrix b) : b_(std::move(b)) {
    detail::require_square(b_, "ML coefficient matrix");
    for (Eigen::Index r = 0; r < b_.rows(); ++r)
      for (Eigen::Index c = 0; c < b_.cols(); ++c)
        detail::require(b_(r, c) >= 0, "ML coefficient " + entry_label(Node(r), Node(c)) +
                                           " is negative");
    (void)ReachMatrix::from_pattern(b_);
  }
  [[nodiscard]] const Matrix& matrix() const { return b_; }
  [[nodiscard]] std::size_t size() const { return std::size_t(b_.rows()); }
  [[nodiscard]] double operator()(Node j, Node i) const { return b_(Eigen::Index(j), Eigen::Index(i)); }

 private:
  Matrix b_;
};

/// Standardized ML coefficient matrix B̄: nonnegative with positive diagonal
/// and unit column sums. Validity as the MLCM of some model is a separate
/// question answered by is_mlcm.
class StdMlcMatrix {
 public:
  explicit StdMlcMatrix(Matrix b, const Tolerance& tol = {}) : b_(std::move(b)) {
    detail::require_square(b_, "standardized ML coefficient matrix");
    for (Eigen::Index c = 0; c < b_.cols(); ++c) {
      detail::require(b_(c, c) > 0, "diagonal entry " + entry_label(Node(c), Node(c)) +
                                        " must be positive");
      for (Eigen::Index r = 0; r < b_.rows(); ++r)
        detail::require(b_(r, c) >= 0, "entry " + entry_label(Node(r), Node(c)) + " is negative");
      const double s = b_.col(c).sum();
      detail::require(tol.close(s, 1.0), "column " + std::to_string(c + 1) + " sums to " +
                                             format_double(s) + " instead of 1");
    }
  }
  [[nodiscard]] const Matrix& matrix() const { return b_; }
  [[nodiscard]] std::size_t size() const { return std::size_t(b_.rows()); }
  [[nodiscard]] double operator()(Node j, Node i) const { return b_(Eigen::Index(j), Eigen::Index(i)); }

 private:
  Matrix b_;
};

/// Boolean classification with the worst scale-aware residual observed.
struct Classification {
  bool holds = true;
  double residual = 0.0;
  explicit operator bool() const { return holds; }
};

/// sgn of a nonnegative matrix as a validated reachability matrix.
inline ReachMatrix sign_pattern(const Matrix& m) { return ReachMatrix::from_pattern(m); }

inline MlcMatrix mlcm_from_weights(const WeightedModel& model) {
  const Dag& g = model.dag();
  const auto d = Eigen::Index(g.size());
  Matrix b = Matrix::Zero(d, d);
  for (Node i : g.topological_order()) {
    const auto ii = Eigen::Index(i);
    b(ii, ii) = model.weight(i, i);
    for (Node k : g.parents(i)) {
      const double c = model.weight(k, i);
      for (Eigen::Index j = 0; j < d; ++j) b(j, ii) = std::max(b(j, ii), b(j, Eigen::Index(k)) * c);
    }
  }
  return MlcMatrix(std::move(b));
}

inline StdMlcMatrix standardize(const MlcMatrix& b, double alpha) {
  detail::require(std::isfinite(alpha) && alpha > 0, "tail index must be finite and positive");
  Matrix p = b.matrix().array().pow(alpha).matrix();
  for (Eigen::Index c = 0; c < p.cols(); ++c) p.col(c) /= p.col(c).sum();
  return StdMlcMatrix(std::move(p));
}

/// b̃_ij = β_j b̄_ij^{1/α̃}, a member of the family sharing B̄ at tail index α̃.
inline MlcMatrix destandardize(const StdMlcMatrix& bbar, const std::vector<double>& betas,
                               double alpha_tilde) {
  detail::require(betas.size() == bbar.size(), "need one scaling factor per column");
  detail::require(std::isfinite(alpha_tilde) && alpha_tilde > 0,
                  "tail index must be finite and positive");
  Matrix out = bbar.matrix().array().pow(1.0 / alpha_tilde).matrix();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double beta = betas[std::size_t(c)];
    detail::require(std::isfinite(beta) && beta > 0,
                    "scaling factor " + std::to_string(c + 1) + " must be positive");
    out.col(c) *= beta;
  }
  return MlcMatrix(std::move(out));
}

/// Whether the j->i relation factors through k: b̄_ji = b̄_jk b̄_ki / b̄_kk.
inline Classification max_weighted_triple(const StdMlcMatrix& bbar, Node j, Node k, Node i,
                                          const Tolerance& tol = {}) {
  const std::size_t d = bbar.size();
  detail::require(j < d && k < d && i < d, "triple node outside 1.." + std::to_string(d));
  detail::require(j != k && k != i && bbar(j, k) > 0 && bbar(k, i) > 0,
                  "node " + std::to_string(k + 1) + " does not lie strictly between " +
                      std::to_string(j + 1) + " and " + std::to_string(i + 1));
  const double product = bbar(j, k) * bbar(k, i) / bbar(k, k);
  return {tol.close(bbar(j, i), product), tol.residual(bbar(j, i), product)};
}

/// True iff every path is max-weighted: b̄_ji = b̄_jk b̄_ki / b̄_kk for all
/// j in an(i) and k in de(j) ∩ an(i). Restricting k to parents of i in the
/// transitive reduction gives the same answer since the identity composes
/// along chains.
inline Classification is_rmwm_mlcm(const StdMlcMatrix& bbar, const Tolerance& tol = {}) {
  const ReachMatrix r = sign_pattern(bbar.matrix());
  Classification out;
  const std::size_t d = bbar.size();
  for (Node i = 0; i < d; ++i)
    for (Node j = 0; j < d; ++j) {
      if (j == i || !r(j, i)) continue;
      for (Node k = 0; k < d; ++k) {
        if (k == i || k == j || !r(j, k) || !r(k, i)) continue;
        const double product = bbar(j, k) * bbar(k, i) / bbar(k, k);
        out.residual = std::max(out.residual, tol.residual(bbar(j, i), product));
        if (!tol.close(bbar(j, i), product)) out.holds = false;
      }
    }
  return out;
}

/// Edge k->i iff k reaches i and b_ki strictly exceeds every detour
/// b_kl b_li / b_ll through l in de(k) ∩ an(i). The criterion is invariant
/// under column scaling and powers, so it applies to B and B̄ alike.
inline Dag minimum_ml_dag(const Matrix& b, const Tolerance& tol = {}) {
  const ReachMatrix r = sign_pattern(b);
  const std::size_t d = r.size();
  auto at = [&](Node x, Node y) { return b(Eigen::Index(x), Eigen::Index(y)); };
  std::vector<Edge> edges;
  for (Node k = 0; k < d; ++k)
    for (Node i = 0; i < d; ++i) {
      if (k == i || !r(k, i)) continue;
      double detour = 0.0;
      for (Node l = 0; l < d; ++l)
        if (l != k && l != i && r(k, l) && r(l, i)) detour = std::max(detour, at(k, l) * at(l, i) / at(l, l));
      if (tol.greater(at(k, i), detour)) edges.push_back({k, i});
    }
  return Dag(d, std::move(edges));
}
inline Dag minimum_ml_dag(const StdMlcMatrix& bbar, const Tolerance& tol = {}) {
  return minimum_ml_dag(bbar.matrix(), tol);
}
inline Dag minimum_ml_dag(const MlcMatrix& b, const Tolerance& tol = {}) {
  return minimum_ml_dag(b.matrix(), tol);
}

struct MlcmCheck {
  enum class Verdict { valid, bad_sign_pattern, recomposition_mismatch };
  Verdict verdict = Verdict::valid;
  double residual = 0.0;
  std::string detail;
  explicit operator bool() const { return verdict == Verdict::valid; }
};

inline const char* to_string(MlcmCheck::Verdict v) {
  switch (v) {
    case MlcmCheck::Verdict::valid: return "valid";
    case MlcmCheck::Verdict::bad_sign_pattern: return "bad_sign_pattern";
    case MlcmCheck::Verdict::recomposition_mismatch: return "recomposition_mismatch";
  }
  return "unknown";
}

/// Edge weights c_ki = b_ki / b_kk on the minimum ML DAG and noise scales
/// c_ii = b_ii. These reproduce `b` exactly when `b` is an MLCM.
inline WeightedModel weights_on_minimum_dag(const Matrix& b, double alpha, const Tolerance& tol = {}) {
  Dag g = minimum_ml_dag(b, tol);
  const auto d = Eigen::Index(g.size());
  Matrix c = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) c(i, i) = b(i, i);
  for (const Edge& e : g.edges()) {
    const auto k = Eigen::Index(e.from), i = Eigen::Index(e.to);
    c(k, i) = b(k, i) / b(k, k);
  }
  return WeightedModel(std::move(g), std::move(c), alpha);
}

/// Decides whether a nonnegative matrix with positive diagonal is the
/// (standardized) MLCM of a recursive max-linear model by rebuilding the
/// model on its minimum ML DAG and comparing.
inline MlcmCheck is_mlcm(const Matrix& b, const Tolerance& tol = {}) {
  detail::require_square(b, "candidate ML coefficient matrix");
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    detail::require(b(r, r) > 0, "diagonal entry " + entry_label(Node(r), Node(r)) + " must be positive");
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      detail::require(b(r, c) >= 0, "entry " + entry_label(Node(r), Node(c)) + " is negative");
  }
  MlcmCheck out;
  try {
    (void)sign_pattern(b);
  } catch (const InvalidInput& e) {
    out.verdict = MlcmCheck::Verdict::bad_sign_pattern;
    out.detail = e.what();
    return out;
  }
  const Matrix rebuilt = mlcm_from_weights(weights_on_minimum_dag(b, 1.0, tol)).matrix();
  for (Eigen::Index i = 0; i < b.cols(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double res = tol.residual(b(j, i), rebuilt(j, i));
      if (res > out.residual) out.residual = res;
      if (!tol.close(b(j, i), rebuilt(j, i)) && out.verdict == MlcmCheck::Verdict::valid) {
        out.verdict = MlcmCheck::Verdict::recomposition_mismatch;
        out.detail = "entry " + entry_label(Node(j), Node(i)) + " is " + format_double(b(j, i)) +
                     " but the rebuilt model gives " + format_double(rebuilt(j, i));
      }
    }
  return out;
}
inline MlcmCheck is_mlcm(const StdMlcMatrix& bbar, const Tolerance& tol = {}) {
  return is_mlcm(bbar.matrix(), tol);
}

/// c_ii = |An(i)|^{-1/α}, c_ki = (|An(k)| / |An(i)|)^{1/α}.
inline WeightedModel homogeneous_model(const Dag& g, double alpha) {
  detail::require(std::isfinite(alpha) && alpha > 0, "tail index must be finite and positive");
  const ReachMatrix r = reachability_matrix(g);
  const auto d = Eigen::Index(g.size());
  std::vector<double> count(g.size());
  for (Node i = 0; i < g.size(); ++i) count[i] = double(r.ancestors(i).size() + 1);
  Matrix c = Matrix::Zero(d, d);
  for (Node i = 0; i < g.size(); ++i) c(Eigen::Index(i), Eigen::Index(i)) = std::pow(count[i], -1.0 / alpha);
  for (const Edge& e : g.edges())
    c(Eigen::Index(e.from), Eigen::Index(e.to)) = std::pow(count[e.from] / count[e.to], 1.0 / alpha);
  return WeightedModel(g, std::move(c), alpha);
}

/// A model at tail index α whose standardized MLCM is `bbar`, with unit
/// column scaling in the family b̃ = b̄^{1/α}.
inline WeightedModel model_from_std_mlcm(const StdMlcMatrix& bbar, double alpha,
                                         const Tolerance& tol = {}) {
  const MlcMatrix b = destandardize(bbar, std::vector<double>(bbar.size(), 1.0), alpha);
  return weights_on_minimum_dag(b.matrix(), alpha, tol);
}

}  // namespace rmlm
