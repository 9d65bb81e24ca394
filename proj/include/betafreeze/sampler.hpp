#pragma once

// Exact sampling of the β-Hermite ensemble (β = 2k) through the
// Dumitriu-Edelman tridiagonal model, plus a random-walk Metropolis
// oracle for small-N cross-checks.
//
// Convention: diagonal entries N(0,1), off-diagonal entry i (1-based)
// χ_{2k(n-i)}/√2. The eigenvalue density is then proportional to
// Π|λ_i - λ_j|^{2k} exp(-‖λ‖²/2), with no further rescaling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "betafreeze/linalg.hpp"
#include "betafreeze/rng.hpp"

namespace betafreeze {

/// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 via Γ(a) = Γ(a+1) U^{1/a}.
inline double sample_gamma(SeedStream& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// χ_df as the square root of a Gamma(df/2, scale 2) variate.
inline double sample_chi(SeedStream& rng, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("sample_chi: df must be positive");
  return std::sqrt(2.0 * sample_gamma(rng, 0.5 * df));
}

struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[i] couples rows i and i+1

  int n() const noexcept { return static_cast<int>(diag.size()); }
};

inline TridiagonalMatrix build_tridiagonal(int n, double k, SeedStream& rng) {
  if (n < 2) throw std::invalid_argument("build_tridiagonal: n must be >= 2");
  if (!(k > 0.0)) throw std::invalid_argument("build_tridiagonal: k must be positive");
  TridiagonalMatrix t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (auto& d : t.diag) d = rng.normal();
  for (int i = 1; i < n; ++i)
    t.offdiag[i - 1] = sample_chi(rng, 2.0 * k * (n - i)) / std::numbers::sqrt2;
  return t;
}

/// Eigenvalues only, descending.
inline std::vector<double> eigen_tridiagonal(const TridiagonalMatrix& t) {
  auto values = tridiagonal_eigenvalues(t.diag, t.offdiag);
  std::reverse(values.begin(), values.end());
  return values;
}

/// One ordered draw X_{k,N}, descending.
struct EnsembleSample {
  int n = 0;
  double k = 0.0;
  std::vector<double> values;

  double beta() const noexcept { return 2.0 * k; }
};

inline EnsembleSample sample_ensemble(int n, double k, SeedStream& rng) {
  return {n, k, eigen_tridiagonal(build_tridiagonal(n, k, rng))};
}

/// Log of the unnormalized ensemble density on unordered coordinates.
inline double ensemble_log_density(const std::vector<double>& x, double k) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s -= 0.5 * x[i] * x[i];
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = std::abs(x[i] - x[j]);
      if (d == 0.0) return -std::numeric_limits<double>::infinity();
      s += 2.0 * k * std::log(d);
    }
  }
  return s;
}

/// Random-walk Metropolis chain targeting the ensemble density.
///
/// The isotropic proposal scale adapts toward 25% acceptance during burn-in
/// and is frozen afterwards, so post-burn-in draws come from a fixed kernel.
class MetropolisOracle {
 public:
  static constexpr long kDefaultBurnIn = 100000;
  static constexpr long kDefaultThin = 100;

  MetropolisOracle(int n, double k, SeedStream rng, long burn_in = kDefaultBurnIn,
                   long thin = kDefaultThin)
      : n_(n), k_(k), thin_(thin), rng_(rng), x_(n) {
    if (n < 2 || n > 3) throw std::invalid_argument("MetropolisOracle: n must be 2 or 3");
    if (!(k > 0.0) || k > 10.0)
      throw std::invalid_argument("MetropolisOracle: k must lie in (0, 10]");
    if (burn_in < 0 || thin < 1) throw std::invalid_argument("MetropolisOracle: bad burn-in/thin");
    // Start from an evenly spread configuration of the right scale.
    for (int i = 0; i < n; ++i) x_[i] = std::sqrt(2.0 * k) * (0.5 * (n - 1) - i);
    log_p_ = ensemble_log_density(x_, k_);

    constexpr long kWindow = 500;
    long accepted = 0;
    for (long step = 1; step <= burn_in; ++step) {
      accepted += advance() ? 1 : 0;
      if (step % kWindow == 0) {
        const double rate = static_cast<double>(accepted) / kWindow;
        scale_ *= std::exp(rate - 0.25);
        accepted = 0;
      }
    }
  }

  /// Next thinned draw, sorted descending.
  std::vector<double> next() {
    for (long i = 0; i < thin_; ++i) {
      ++proposals_;
      accepted_ += advance() ? 1 : 0;
    }
    std::vector<double> out = x_;
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

  double proposal_scale() const noexcept { return scale_; }
  double acceptance_rate() const noexcept {
    return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / proposals_;
  }

 private:
  bool advance() {
    std::vector<double>& y = proposal_;
    y.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) y[i] = x_[i] + scale_ * rng_.normal();
    const double log_q = ensemble_log_density(y, k_);
    if (std::log(rng_.uniform()) < log_q - log_p_) {
      x_.swap(y);
      log_p_ = log_q;
      return true;
    }
    return false;
  }

  int n_;
  double k_;
  long thin_;
  SeedStream rng_;
  std::vector<double> x_;
  std::vector<double> proposal_;
  double log_p_ = 0.0;
  double scale_ = 1.0;
  long proposals_ = 0;
  long accepted_ = 0;
};

/// Single approximate draw: a fresh chain burned in and thinned once.
inline EnsembleSample mh_oracle_sample(int n, double k, SeedStream& rng,
                                       long burn_in = MetropolisOracle::kDefaultBurnIn,
                                       long thin = MetropolisOracle::kDefaultThin) {
  MetropolisOracle chain(n, k, rng.split(0), burn_in, thin);
  rng = rng.split(1);
  return {n, k, chain.next()};
}

}  // namespace betafreeze
