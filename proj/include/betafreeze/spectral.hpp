#pragma once

// Precision matrix S_N of the Gaussian freezing limit, its spectrum, the
// trace identities it implies, and sampling from N(0, S_N⁻¹).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "betafreeze/errors.hpp"
#include "betafreeze/hermite.hpp"
#include "betafreeze/linalg.hpp"
#include "betafreeze/rng.hpp"

namespace betafreeze {

/// S_N, its ascending eigenvalues, and a lower-triangular L with L Lᵀ = S_N⁻¹.
struct PrecisionSpectralPair {
  int n = 0;
  Matrix precision;
  std::vector<double> eigenvalues;
  Matrix chol_cov;

  Matrix covariance() const { return chol_cov * chol_cov.transposed(); }
};

/// Builds S_N with s_ii = 1 + Σ_{l≠i} (z_i - z_l)^-2 and s_ij = -(z_i - z_j)^-2.
///
/// The covariance factor comes from the Cholesky factor R' of the
/// index-reversed S: with P the reversal, S⁻¹ = (P R'^-T P)(P R'^-1 P) and
/// P R'^-T P is lower triangular.
inline PrecisionSpectralPair build_precision(const HermiteZeros& z) {
  const std::size_t n = static_cast<std::size_t>(z.order());
  PrecisionSpectralPair out;
  out.n = z.order();
  out.precision = Matrix(n);
  Matrix& s = out.precision;
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = z[i] - z[j];
      const double w = 1.0 / (d * d);
      s(i, j) = -w;
      diag += w;
    }
    s(i, i) = diag;
    if (!std::isfinite(diag))
      throw FactorizationFailure("build_precision: non-finite precision entry (gaps too small)");
  }

  Matrix reversed(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) reversed(i, j) = s(n - 1 - i, n - 1 - j);
  const Matrix r_inv = invert_lower(cholesky_lower(reversed));
  out.chol_cov = Matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out.chol_cov(i, j) = r_inv(n - 1 - j, n - 1 - i);
  out.eigenvalues = symmetric_eigenvalues(s);
  return out;
}

/// max_m |λ_m - m| over the ascending eigenvalues of S_N.
inline double spectrum_deviation(const PrecisionSpectralPair& p) {
  double worst = 0.0;
  for (std::size_t m = 0; m < p.eigenvalues.size(); ++m)
    worst = std::max(worst, std::abs(p.eigenvalues[m] - static_cast<double>(m + 1)));
  return worst;
}

/// Σ over ordered pairs i≠j of (z_i - z_j)^-p, p ∈ {2, 4}.
inline double inverse_power_sum(const HermiteZeros& z, int power) {
  if (power != 2 && power != 4)
    throw std::invalid_argument("inverse_power_sum: power must be 2 or 4");
  const auto v = z.values();
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const long double d = static_cast<long double>(v[i]) - v[j];
      if (d == 0.0L) throw DegenerateInput("inverse_power_sum: coincident entries");
      const long double d2 = d * d;
      s += power == 2 ? 1.0L / d2 : 1.0L / (d2 * d2);
    }
  return static_cast<double>(2.0L * s);
}

/// Smallest consecutive gap M_N = min_i (z_i - z_{i+1}).
inline double min_gap(const HermiteZeros& z) {
  const auto v = z.values();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) m = std::min(m, v[i] - v[i + 1]);
  return m;
}

/// One draw of N(0, Σ_N) as L g with g standard normal.
inline std::vector<double> sample_gaussian_limit(const PrecisionSpectralPair& p, SeedStream& rng) {
  const std::size_t n = static_cast<std::size_t>(p.n);
  std::vector<double> g(n);
  for (auto& x : g) x = rng.normal();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += p.chol_cov(i, j) * g[j];
    y[i] = s;
  }
  return y;
}

}  // namespace betafreeze
