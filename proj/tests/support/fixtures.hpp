#pragma once

// Worked examples used across the suites. Nodes are 0-based here; comments
// use 1-based labels.

#include "rmlm/rmlm.hpp"

#include <gtest/gtest.h>

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using rmlm::Dag;
using rmlm::Edge;
using rmlm::Matrix;
using rmlm::Node;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(Eigen::Index(rows.size()), Eigen::Index(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

/// Edges given with 1-based labels.
inline Dag dag1(std::size_t d, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<Edge> out;
  for (auto [k, i] : edges) out.push_back({Node(k - 1), Node(i - 1)});
  return Dag(d, std::move(out));
}

inline Dag chain(std::size_t d) {
  std::vector<Edge> e;
  for (Node v = 0; v + 1 < d; ++v) e.push_back({v, v + 1});
  return Dag(d, std::move(e));
}

// Two-node example: χ(1, 2) = b, with 1 -> 2 or 2 -> 1.
inline Matrix pair_chi(double b) { return mat({{1, b}, {b, 1}}); }
inline Matrix pair_b1(double b) { return mat({{1, b}, {0, 1 - b}}); }
inline Matrix pair_b2(double b) { return mat({{1 - b, 0}, {b, 1}}); }

// Four nodes, edges 1->3, 1->4, 2->3, 2->4, 3->4.
inline Dag dense4_dag() { return dag1(4, {{1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}); }
// Path 2->3->4 is max-weighted, yet χ(2,4) < χ(2,3)χ(3,4).
inline Matrix dense4_mw_b() {
  return mat({{1, 0, 0.4, 0.3}, {0, 1, 0.4, 0.25}, {0, 0, 0.2, 0.125}, {0, 0, 0, 0.325}});
}
// Path 2->3->4 is not max-weighted, yet χ(2,4) = χ(2,3)χ(3,4).
inline Matrix dense4_non_mw_b() {
  return mat({{1, 0, 0.1, 0.085}, {0, 1, 0.8, 0.5}, {0, 0, 0.1, 0.04}, {0, 0, 0, 0.375}});
}

// TDM with maximum χ-cliques {1,2} and {1,4}.
inline Matrix two_clique_chi() {
  return mat({{1, 0, 0.2, 0}, {0, 1, 0.6, 0.5}, {0.2, 0.6, 1, 0.5}, {0, 0.5, 0.5, 1}});
}
inline Matrix two_clique_b1() {
  return mat({{1, 0, 0.2, 0}, {0, 1, 0.6, 0.5}, {0, 0, 0.2, 0}, {0, 0, 0, 0.5}});
}
inline Matrix two_clique_b2() {
  return mat({{1, 0, 0.2, 0}, {0, 0.5, 0.1, 0}, {0, 0, 0.2, 0}, {0, 0.5, 0.5, 1}});
}
inline Dag two_clique_d1() { return dag1(4, {{1, 3}, {2, 3}, {2, 4}}); }
inline Dag two_clique_d2() { return dag1(4, {{1, 3}, {2, 3}, {4, 2}, {4, 3}}); }

// Three-node TDM where the identity ordering yields an MLCM and the
// ordering 1,3,2 yields a matrix that is not one.
inline Matrix ordering_chi() {
  return mat({{1, 1.0 / 10, 1.0 / 3}, {1.0 / 10, 1, 13.0 / 30}, {1.0 / 3, 13.0 / 30, 1}});
}
inline Matrix ordering_b1() {
  return mat({{1, 1.0 / 10, 1.0 / 3}, {0, 9.0 / 10, 1.0 / 3}, {0, 0, 1.0 / 3}});
}
inline Matrix ordering_b2() {
  return mat({{1, 1.0 / 10, 1.0 / 3}, {0, 17.0 / 30, 0}, {0, 1.0 / 3, 2.0 / 3}});
}
// Recovered with node 2 first (ordering 2,1,3); a valid MLCM with the same TDM.
inline Matrix ordering_b_from2() {
  return mat({{9.0 / 10, 0, 7.0 / 30}, {1.0 / 10, 1, 13.0 / 30}, {0, 0, 1.0 / 3}});
}

// Same TDM and initial node from two DAGs: 1->2, 1->3, 2->3 and 1->2, 1->3, 3->2.
inline Matrix shared_tdm_b1() { return mat({{1, 0.2, 0.3}, {0, 0.8, 0.4}, {0, 0, 0.3}}); }
inline Matrix shared_tdm_b2() { return mat({{1, 0.2, 0.3}, {0, 0.4, 0}, {0, 0.4, 0.7}}); }
inline Dag shared_tdm_d1() { return dag1(3, {{1, 2}, {1, 3}, {2, 3}}); }
inline Dag shared_tdm_d2() { return dag1(3, {{1, 2}, {1, 3}, {3, 2}}); }

inline Dag diamond() { return dag1(4, {{1, 2}, {1, 3}, {2, 4}, {3, 4}}); }

inline void add_chain(std::vector<Edge>& e, int from, int to) {
  for (int v = from; v < to; ++v) e.push_back({Node(v - 1), Node(v)});
}

// 99 nodes: 1->2, then three routes from 2 to 98 (via 35..66, via 3..34,
// via 35->67..97), and 98->99.
inline Dag lambda_dag() {
  std::vector<Edge> e{{0, 1}, {1, 34}, {65, 97}, {97, 98}, {1, 2}, {33, 97}, {34, 66}, {96, 97}};
  add_chain(e, 35, 66);
  add_chain(e, 3, 34);
  add_chain(e, 67, 97);
  return Dag(99, std::move(e));
}

// 97 nodes: 96 and 97 share the lowest common ancestors 33, 64 and 94.
inline Dag mu_dag() {
  std::vector<Edge> e{{0, 1}, {1, 33}, {63, 95}, {1, 2}, {32, 95}, {32, 94}, {33, 64}, {93, 95},
                      {32, 96}, {63, 96}, {93, 96}};
  add_chain(e, 34, 64);
  add_chain(e, 3, 33);
  add_chain(e, 65, 94);
  return Dag(97, std::move(e));
}

inline Dag reversed(const Dag& g) {
  std::vector<Edge> e;
  for (const Edge& x : g.edges()) e.push_back({x.to, x.from});
  return Dag(g.size(), std::move(e));
}

inline rmlm::NodeSet nodes1(std::initializer_list<int> labels) {
  rmlm::NodeSet out;
  for (int v : labels) out.push_back(Node(v - 1));
  return out;
}

inline ::testing::AssertionResult matrix_near(const Matrix& actual, const Matrix& expected, double tol) {
  if (actual.rows() != expected.rows() || actual.cols() != expected.cols())
    return ::testing::AssertionFailure() << "shape " << actual.rows() << "x" << actual.cols() << " vs "
                                         << expected.rows() << "x" << expected.cols();
  for (Eigen::Index r = 0; r < actual.rows(); ++r)
    for (Eigen::Index c = 0; c < actual.cols(); ++c)
      if (!(std::abs(actual(r, c) - expected(r, c)) <= tol))
        return ::testing::AssertionFailure()
               << "entry " << rmlm::entry_label(Node(r), Node(c)) << ": " << rmlm::format_double(actual(r, c))
               << " vs " << rmlm::format_double(expected(r, c)) << "\nactual:\n"
               << actual << "\nexpected:\n"
               << expected;
  return ::testing::AssertionSuccess();
}

}  // namespace fixtures
