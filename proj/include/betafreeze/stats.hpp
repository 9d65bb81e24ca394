#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "betafreeze/linalg.hpp"

namespace betafreeze {

/// Monte Carlo tail estimate with an exact binomial confidence interval.
struct TailEstimate {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.99;
};

inline constexpr double kDefaultConfidence = 0.99;

/// Clopper-Pearson interval: endpoints are beta quantiles, so
/// P(Bin(n, ci_high) ≤ hits) = P(Bin(n, ci_low) ≥ hits) = (1 - confidence)/2.
inline TailEstimate clopper_pearson(std::uint64_t hits, std::uint64_t trials,
                                    double confidence = kDefaultConfidence) {
  if (trials == 0) throw std::invalid_argument("clopper_pearson: trials must be positive");
  if (hits > trials) throw std::invalid_argument("clopper_pearson: hits exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence must lie in (0, 1)");
  const double alpha = 1.0 - confidence;
  const double h = static_cast<double>(hits);
  const double n = static_cast<double>(trials);
  TailEstimate t;
  t.trials = trials;
  t.hits = hits;
  t.p_hat = h / n;
  t.confidence = confidence;
  t.ci_low = hits == 0 ? 0.0 : boost::math::ibeta_inv(h, n - h + 1.0, alpha / 2.0);
  t.ci_high = hits == trials ? 1.0 : boost::math::ibeta_inv(h + 1.0, n - h, 1.0 - alpha / 2.0);
  t.ci_low = std::min(t.ci_low, t.p_hat);
  t.ci_high = std::max(t.ci_high, t.p_hat);
  return t;
}

/// One-pass mean and covariance (Welford updates, Chan merge).
class RunningMoments {
 public:
  explicit RunningMoments(std::size_t dim = 0) : dim_(dim), mean_(dim, 0.0), comoment_(dim) {}

  void add(const std::vector<double>& x) {
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    delta_.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      delta_[i] = x[i] - mean_[i];
      mean_[i] += delta_[i] * inv;
    }
    // C += (x - mean_old)(x - mean_new)ᵀ
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) comoment_(i, j) += delta_[i] * (x[j] - mean_[j]);
  }

  void merge(const RunningMoments& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) d[i] = other.mean_[i] - mean_[i];
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        comoment_(i, j) += other.comoment_(i, j) + d[i] * d[j] * na * nb / n;
    for (std::size_t i = 0; i < dim_; ++i) mean_[i] += d[i] * nb / n;
    count_ += other.count_;
  }

  std::uint64_t count() const noexcept { return count_; }
  const std::vector<double>& mean() const noexcept { return mean_; }

  /// Unbiased sample covariance.
  Matrix covariance() const {
    Matrix c(dim_);
    if (count_ < 2) return c;
    const double denom = static_cast<double>(count_ - 1);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) c(i, j) = comoment_(i, j) / denom;
    return c;
  }

 private:
  std::size_t dim_;
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  Matrix comoment_;
  std::vector<double> delta_;
};

}  // namespace betafreeze
