#pragma once

// Forward simulation with Pareto or Fréchet noise, the empirical tail
// dependence estimator, and the closed-form max-stable limit of the model.

#include "rmlm/core.hpp"
#include "rmlm/mlcm.hpp"
#include "rmlm/taildep.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace rmlm {

enum class NoiseFamily { pareto, frechet };

inline const char* to_string(NoiseFamily f) { return f == NoiseFamily::pareto ? "pareto" : "frechet"; }

inline NoiseFamily parse_noise_family(const std::string& s) {
  if (s == "pareto") return NoiseFamily::pareto;
  if (s == "frechet") return NoiseFamily::frechet;
  throw InvalidInput("unsupported noise family '" + s + "' (expected pareto or frechet)");
}

/// Pareto: P(Z > x) = x^{-α} on [1, ∞). Fréchet: P(Z <= x) = exp(-x^{-α}).
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::frechet;
  double alpha = 1.0;
};

struct SampleBlock {
  Matrix values;  // n × d, row ν is the ν-th draw of X
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::size_t kChunkRows = 4096;

// Independent stream per (seed, chunk) so chunks can be generated in any
// order with identical results.
inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(chunk),
                    std::uint32_t(chunk >> 32)};
  return std::mt19937_64(seq);
}

class NoiseDraw {
 public:
  explicit NoiseDraw(const NoiseSpec& spec)
      : family_(spec.family), inv_alpha_(1.0 / spec.alpha),
        unif_(std::nextafter(0.0, 1.0), 1.0) {}
  double operator()(std::mt19937_64& eng) {
    const double u = unif_(eng);
    return family_ == NoiseFamily::pareto ? std::pow(u, -inv_alpha_) : std::pow(-std::log(u), -inv_alpha_);
  }

 private:
  NoiseFamily family_;
  double inv_alpha_;
  std::uniform_real_distribution<double> unif_;
};

inline void check_noise(const WeightedModel& model, const NoiseSpec& noise) {
  require(std::isfinite(noise.alpha) && noise.alpha > 0, "noise tail index must be finite and positive");
  require(noise.alpha == model.alpha(), "noise tail index " + format_double(noise.alpha) +
                                            " differs from the model's " + format_double(model.alpha()));
}

// One draw X_i = max_j b_ji Z_j into `row`.
template <class Row>
void draw_row(const Matrix& b, NoiseDraw& draw, std::mt19937_64& eng, std::vector<double>& z, Row&& row) {
  const auto d = b.rows();
  for (Eigen::Index j = 0; j < d; ++j) z[std::size_t(j)] = draw(eng);
  for (Eigen::Index i = 0; i < d; ++i) {
    double x = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      if (b(j, i) > 0) x = std::max(x, b(j, i) * z[std::size_t(j)]);
    row(i) = x;
  }
}

}  // namespace detail

inline SampleBlock sample(const WeightedModel& model, const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  detail::require(n >= 1, "sample size must be at least 1");
  detail::check_noise(model, noise);
  const Matrix b = mlcm_from_weights(model).matrix();
  SampleBlock out;
  out.seed = seed;
  out.values.resize(Eigen::Index(n), b.cols());
  detail::NoiseDraw draw(noise);
  std::vector<double> z(model.size());
  for (std::size_t start = 0, chunk = 0; start < n; start += detail::kChunkRows, ++chunk) {
    auto eng = detail::chunk_engine(seed, chunk);
    const std::size_t stop = std::min(n, start + detail::kChunkRows);
    for (std::size_t r = start; r < stop; ++r)
      detail::draw_row(b, draw, eng, z, [&](Eigen::Index i) -> double& { return out.values(Eigen::Index(r), i); });
  }
  return out;
}

/// Exceedance-ratio estimate of χ at quantile level u. The threshold for
/// column i is its ⌈n u⌉-th order statistic; pair counts are divided by
/// each margin's exceedance count and the two ratios averaged.
inline TailDepMatrix empirical_tdm(const SampleBlock& s, double u) {
  detail::require(u > 0 && u < 1, "quantile level must lie in (0, 1)");
  const Eigen::Index n = s.values.rows(), d = s.values.cols();
  detail::require(n > 0 && d > 0, "sample is empty");
  const auto rank = std::size_t(std::ceil(double(n) * u));
  const auto dn = std::size_t(d), nn = std::size_t(n);
  std::vector<std::vector<char>> above(dn, std::vector<char>(nn, 0));
  std::vector<double> count(std::size_t(d), 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<double> col(s.values.col(i).data(), s.values.col(i).data() + n);
    std::nth_element(col.begin(), col.begin() + std::ptrdiff_t(rank - 1), col.end());
    const double q = col[rank - 1];
    for (Eigen::Index r = 0; r < n; ++r)
      if (s.values(r, i) > q) {
        above[std::size_t(i)][std::size_t(r)] = 1;
        ++count[std::size_t(i)];
      }
    if (count[std::size_t(i)] < 50)
      throw InvalidInput("component " + std::to_string(i + 1) + " has only " +
                         std::to_string(std::size_t(count[std::size_t(i)])) +
                         " exceedances; at least 50 are needed");
  }
  Matrix chi = Matrix::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      double joint = 0.0;
      const auto& a = above[std::size_t(i)];
      const auto& b = above[std::size_t(j)];
      for (std::size_t r = 0; r < std::size_t(n); ++r) joint += double(a[r] & b[r]);
      chi(i, j) = chi(j, i) = 0.5 * (joint / count[std::size_t(i)] + joint / count[std::size_t(j)]);
    }
  return TailDepMatrix(std::move(chi));
}

namespace detail {

inline void require_point(double x, Node i) {
  require(x > 0 && !std::isnan(x), "coordinate " + std::to_string(i + 1) + " must be positive, got " +
                                       format_double(x));
}

}  // namespace detail

/// G(x) = exp{-Σ_j max_{i∈De(j)} (b_ji / x_i)^α}. Coordinates may be +∞.
inline double limit_cdf(const WeightedModel& model, const std::vector<double>& x) {
  detail::require(x.size() == model.size(), "point has " + std::to_string(x.size()) +
                                                " coordinates but the model has " + std::to_string(model.size()));
  for (Node i = 0; i < x.size(); ++i) detail::require_point(x[i], i);
  const Matrix b = mlcm_from_weights(model).matrix();
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < b.cols(); ++i)
      if (b(j, i) > 0) m = std::max(m, std::pow(b(j, i) / x[std::size_t(i)], model.alpha()));
    s += m;
  }
  return std::exp(-s);
}

/// G_i(x) = exp{-x^{-α} Σ_{j∈An(i)} b_ji^α}.
inline double limit_marginal_cdf(const WeightedModel& model, Node i, double x) {
  detail::require(i < model.size(), "node " + std::to_string(i + 1) + " is outside the model");
  detail::require_point(x, i);
  const Matrix b = mlcm_from_weights(model).matrix();
  const double s = b.col(Eigen::Index(i)).array().pow(model.alpha()).sum();
  return std::exp(-std::pow(x, -model.alpha()) * s);
}

/// G_ij(x_i, x_j) = exp{-Σ_{k∈An(i)∪An(j)} max((b_ki/x_i)^α, (b_kj/x_j)^α)}.
inline double limit_bivariate_cdf(const WeightedModel& model, Node i, Node j, double xi, double xj) {
  detail::require(i < model.size() && j < model.size(), "node outside the model");
  detail::require_point(xi, i);
  detail::require_point(xj, j);
  const Matrix b = mlcm_from_weights(model).matrix();
  const double a = model.alpha();
  double s = 0.0;
  for (Eigen::Index k = 0; k < b.rows(); ++k)
    s += std::max(std::pow(b(k, Eigen::Index(i)) / xi, a), std::pow(b(k, Eigen::Index(j)) / xj, a));
  return std::exp(-s);
}

/// x_i = (Σ_j b_ji^α)^{1/α}, where G_i(x_i) = e^{-1}.
inline double standardization_point(const WeightedModel& model, Node i) {
  detail::require(i < model.size(), "node " + std::to_string(i + 1) + " is outside the model");
  const Matrix b = mlcm_from_weights(model).matrix();
  return std::pow(b.col(Eigen::Index(i)).array().pow(model.alpha()).sum(), 1.0 / model.alpha());
}

/// `blocks` componentwise maxima of `block_size` draws each, scaled by
/// block_size^{-1/α}.
inline Matrix block_maxima(const WeightedModel& model, const NoiseSpec& noise, std::size_t blocks,
                           std::size_t block_size, std::uint64_t seed) {
  detail::require(blocks >= 1 && block_size >= 1, "need at least one block of at least one draw");
  detail::check_noise(model, noise);
  const Matrix b = mlcm_from_weights(model).matrix();
  const auto d = b.cols();
  const double scale = std::pow(double(block_size), -1.0 / noise.alpha);
  Matrix out = Matrix::Zero(Eigen::Index(blocks), d);
  detail::NoiseDraw draw(noise);
  std::vector<double> z(model.size());
  Eigen::VectorXd row(d);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    auto eng = detail::chunk_engine(seed, blk);
    for (std::size_t r = 0; r < block_size; ++r) {
      detail::draw_row(b, draw, eng, z, [&](Eigen::Index i) -> double& { return row(i); });
      for (Eigen::Index i = 0; i < d; ++i)
        out(Eigen::Index(blk), i) = std::max(out(Eigen::Index(blk), i), row(i));
    }
  }
  return out * scale;
}

/// Kolmogorov–Smirnov distance sup_x |F_n(x) - F(x)|.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  detail::require(!sample.empty(), "sample is empty");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double f = cdf(sample[k]);
    worst = std::max({worst, std::abs(double(k + 1) / n - f), std::abs(f - double(k) / n)});
  }
  return worst;
}

}  // namespace rmlm
