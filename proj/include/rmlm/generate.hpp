#pragma once

// Seeded random DAGs and models for fixtures and property tests.

#include "rmlm/core.hpp"
#include "rmlm/graph.hpp"
#include "rmlm/mlcm.hpp"

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace rmlm {

struct GeneratorOptions {
  std::size_t d = 1;
  double density = 0.5;
  double weight_min = 0.5;
  double weight_max = 2.0;
  double alpha = 1.0;
  bool polytree = false;
  bool homogeneous = false;
};

namespace detail {

inline std::vector<Node> random_permutation(std::size_t d, std::mt19937_64& rng) {
  std::vector<Node> perm(d);
  std::iota(perm.begin(), perm.end(), Node{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace detail

/// Each pair is joined with probability `density`, oriented from the earlier
/// to the later node of a random permutation.
inline Dag random_dag(std::size_t d, double density, std::mt19937_64& rng) {
  detail::require(d >= 1, "need at least one node");
  detail::require(density >= 0 && density <= 1, "density must lie in [0, 1]");
  const auto perm = detail::random_permutation(d, rng);
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      if (coin(rng)) edges.push_back({perm[a], perm[b]});
  return Dag(d, std::move(edges));
}

/// Random forest: each node after the first of a random permutation joins a
/// uniformly chosen earlier node with probability `density`, in a random
/// direction.
inline Dag random_polytree(std::size_t d, double density, std::mt19937_64& rng) {
  detail::require(d >= 1, "need at least one node");
  detail::require(density >= 0 && density <= 1, "density must lie in [0, 1]");
  const auto perm = detail::random_permutation(d, rng);
  std::bernoulli_distribution coin(density), flip(0.5);
  std::vector<Edge> edges;
  for (std::size_t p = 1; p < d; ++p) {
    if (!coin(rng)) continue;
    const Node other = perm[std::uniform_int_distribution<std::size_t>(0, p - 1)(rng)];
    if (flip(rng)) edges.push_back({other, perm[p]});
    else edges.push_back({perm[p], other});
  }
  return Dag(d, std::move(edges));
}

/// Random model with weights and noise scales log-uniform in
/// [weight_min, weight_max], or the homogeneous model on a random DAG.
inline WeightedModel random_model(const GeneratorOptions& opt, std::uint64_t seed) {
  detail::require(opt.weight_min > 0 && opt.weight_min <= opt.weight_max && std::isfinite(opt.weight_max),
                  "weight range must satisfy 0 < min <= max");
  std::mt19937_64 rng(seed);
  Dag g = opt.polytree ? random_polytree(opt.d, opt.density, rng) : random_dag(opt.d, opt.density, rng);
  if (opt.homogeneous) return homogeneous_model(g, opt.alpha);
  std::uniform_real_distribution<double> logw(std::log(opt.weight_min), std::log(opt.weight_max));
  const auto dd = Eigen::Index(opt.d);
  Matrix c = Matrix::Zero(dd, dd);
  for (Eigen::Index i = 0; i < dd; ++i) c(i, i) = std::exp(logw(rng));
  for (const Edge& e : g.edges()) c(Eigen::Index(e.from), Eigen::Index(e.to)) = std::exp(logw(rng));
  return WeightedModel(std::move(g), std::move(c), opt.alpha);
}

}  // namespace rmlm
