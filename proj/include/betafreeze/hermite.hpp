#pragma once

// Hermite polynomials (physicists' convention), their zeros, and the
// scalar identities and constants tied to the frozen configuration of
// the β-Hermite ensemble.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "betafreeze/errors.hpp"
#include "betafreeze/linalg.hpp"

namespace betafreeze {

/// A real number stored as sign and natural log of the magnitude.
struct ScaledReal {
  int sign = 0;  // -1, 0, +1
  double log_abs = -std::numeric_limits<double>::infinity();

  double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

struct HermiteValue {
  ScaledReal value;
  ScaledReal derivative;
};

namespace detail {

struct ScaledPair {
  long double current;   // H_n(x) / exp(log_scale)
  long double previous;  // H_{n-1}(x) / exp(log_scale)
  long double log_scale;
};

// Three-term recurrence H_{m+1} = 2x H_m - 2m H_{m-1} with rescaling.
inline ScaledPair hermite_recurrence(int n, long double x) {
  if (n == 0) return {1.0L, 0.0L, 0.0L};
  long double prev = 1.0L;
  long double cur = 2.0L * x;
  long double log_scale = 0.0L;
  constexpr long double kBig = 0x1.0p+500L;
  for (int m = 1; m < n; ++m) {
    const long double next = 2.0L * x * cur - 2.0L * m * prev;
    prev = cur;
    cur = next;
    const long double mag = std::max(std::fabs(cur), std::fabs(prev));
    if (mag > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += std::log(kBig);
    }
  }
  return {cur, prev, log_scale};
}

inline ScaledReal to_scaled(long double v, long double log_scale) {
  if (v == 0.0L) return {};
  return {v > 0 ? 1 : -1, static_cast<double>(std::log(std::fabs(v)) + log_scale)};
}

}  // namespace detail

/// H_n(x) and H_n'(x) = 2n H_{n-1}(x) in sign/log-magnitude form.
inline HermiteValue hermite_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_eval: n must be >= 0");
  const auto r = detail::hermite_recurrence(n, x);
  HermiteValue out;
  out.value = detail::to_scaled(r.current, r.log_scale);
  if (n > 0) {
    out.derivative = detail::to_scaled(r.previous, r.log_scale);
    if (out.derivative.sign != 0) out.derivative.log_abs += std::log(2.0 * n);
  }
  return out;
}

/// Ordered zeros of H_n, strictly descending.
class HermiteZeros {
 public:
  /// Validates order >= 2 and strict descent; does not check that the
  /// values are actually Hermite zeros (see fixed_point_residual).
  explicit HermiteZeros(std::vector<double> zeros) : zeros_(std::move(zeros)) {
    if (zeros_.size() < 2) throw std::invalid_argument("HermiteZeros: order must be >= 2");
    for (std::size_t i = 0; i + 1 < zeros_.size(); ++i)
      if (!(zeros_[i] > zeros_[i + 1]))
        throw DegenerateInput("HermiteZeros: entries must be strictly descending");
  }

  int order() const noexcept { return static_cast<int>(zeros_.size()); }
  std::span<const double> values() const noexcept { return zeros_; }
  double operator[](std::size_t i) const noexcept { return zeros_[i]; }

 private:
  std::vector<double> zeros_;
};

namespace detail {

inline void require_distinct_descending(std::span<const double> z, const char* who) {
  if (z.size() < 2) throw std::invalid_argument(std::string(who) + ": need at least two points");
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    if (!(z[i] > z[i + 1]))
      throw DegenerateInput(std::string(who) + ": entries must be strictly descending");
}

}  // namespace detail

/// max_i |z_i - Σ_{j≠i} 1/(z_i - z_j)|. Zero exactly at the zeros of H_n.
inline double fixed_point_residual(std::span<const double> z) {
  detail::require_distinct_descending(z, "fixed_point_residual");
  const std::size_t n = z.size();
  long double worst = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += 1.0L / (static_cast<long double>(z[i]) - z[j]);
    worst = std::max(worst, std::fabs(static_cast<long double>(z[i]) - s));
  }
  return static_cast<double>(worst);
}

inline double fixed_point_residual(const HermiteZeros& z) { return fixed_point_residual(z.values()); }

/// |(-‖z‖² + 2 Σ_{i<j} ln(z_i - z_j)) - (-n(n-1)/2 (1 + ln 2) + Σ j ln j)|.
inline double potential_identity_gap(std::span<const double> z) {
  detail::require_distinct_descending(z, "potential_identity_gap");
  const std::size_t n = z.size();
  long double lhs = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    lhs -= static_cast<long double>(z[i]) * z[i];
    for (std::size_t j = i + 1; j < n; ++j)
      lhs += 2.0L * std::log(static_cast<long double>(z[i]) - z[j]);
  }
  const long double nn = static_cast<long double>(n);
  long double rhs = -nn * (nn - 1.0L) / 2.0L * (1.0L + std::log(2.0L));
  for (std::size_t j = 2; j <= n; ++j) rhs += j * std::log(static_cast<long double>(j));
  return static_cast<double>(std::fabs(lhs - rhs));
}

inline double potential_identity_gap(const HermiteZeros& z) {
  return potential_identity_gap(z.values());
}

inline constexpr double kDefaultZeroTolerance = 1e-12;

/// Zeros of H_n: Golub-Welsch eigenvalues of the Jacobi matrix as starting
/// points, Newton polish on the non-negative half, mirrored for exact parity.
/// Throws ConvergenceFailure if the polished zeros miss `tol` on the
/// fixed-point residual.
inline HermiteZeros compute_zeros(int n, double tol = kDefaultZeroTolerance) {
  if (n < 2) throw std::invalid_argument("compute_zeros: n must be >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("compute_zeros: tol must be positive");

  std::vector<double> off(n - 1);
  for (int i = 1; i < n; ++i) off[i - 1] = std::sqrt(i / 2.0);
  const auto guesses = tridiagonal_eigenvalues(std::vector<double>(n, 0.0), off);  // ascending

  const int half = n / 2;
  std::vector<double> zeros(n, 0.0);
  constexpr int kNewtonBudget = 50;
  for (int i = 0; i < half; ++i) {
    long double x = std::fabs(guesses[n - 1 - i]);
    bool converged = false;
    for (int it = 0; it < kNewtonBudget; ++it) {
      const auto r = detail::hermite_recurrence(n, x);
      if (r.current == 0.0L) {
        converged = true;
        break;
      }
      const long double step = r.current / (2.0L * n * r.previous);
      x -= step;
      if (std::fabs(step) <= 4.0L * std::numeric_limits<long double>::epsilon() * std::fabs(x)) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw ConvergenceFailure("compute_zeros: Newton polish did not converge for zero " +
                               std::to_string(i) + " of H_" + std::to_string(n));
    zeros[i] = static_cast<double>(x);
    zeros[n - 1 - i] = -zeros[i];
  }

  HermiteZeros result(std::move(zeros));
  const double residual = fixed_point_residual(result);
  if (!(residual <= tol))
    throw ConvergenceFailure("compute_zeros: fixed-point residual " + std::to_string(residual) +
                             " exceeds tolerance for n = " + std::to_string(n));
  return result;
}

/// ln c_k^A = ln N! - (N/2) ln(2π) + Σ_{j=1}^N [lnΓ(1+k) - lnΓ(1+jk)].
inline double log_norm_const(int n, double k) {
  if (n < 2) throw std::invalid_argument("log_norm_const: N must be >= 2");
  if (!(k > 0.0)) throw std::invalid_argument("log_norm_const: k must be positive");
  double s = std::lgamma(n + 1.0) - 0.5 * n * std::log(2.0 * std::numbers::pi);
  const double lg1k = std::lgamma(1.0 + k);
  for (int j = 1; j <= n; ++j) s += lg1k - std::lgamma(1.0 + j * k);
  return s;
}

/// Stirling remainder μ(x) = lnΓ(x) - ½ln(2π) - (x-½)ln x + x, together with
/// its distance to the two-sided bound 1/(12x) - 1/(360x³) < μ < 1/(12x).
struct StirlingRemainder {
  double x;
  double mu;
  double lower_slack;  // μ - (1/(12x) - 1/(360x³))
  double upper_slack;  // 1/(12x) - μ

  bool within_bounds() const noexcept { return lower_slack > 0.0 && upper_slack > 0.0; }
};

namespace detail {

// B_{2m} / (2m (2m-1)) for m = 1..8.
inline constexpr double kStirlingCoefficients[] = {
    1.0 / 12.0,   -1.0 / 360.0,         1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0, -691.0 / 360360.0,    1.0 / 156.0,  -3617.0 / 122400.0};

// Σ_{m >= first} c_m x^{-(2m-1)}, smallest terms first.
inline double stirling_tail(double x, int first) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double s = 0.0;
  for (int m = 7; m >= first; --m) s += kStirlingCoefficients[m] * std::pow(inv2, m) * inv;
  return s;
}

inline constexpr double kStirlingSeriesThreshold = 10.0;

}  // namespace detail

/// Stirling remainder for x >= 1 (the bound itself holds only for x > 1).
inline StirlingRemainder stirling_mu(double x) {
  if (!(x >= 1.0)) throw std::invalid_argument("stirling_mu: x must be >= 1");
  StirlingRemainder r{x, 0.0, 0.0, 0.0};
  const double lead = 1.0 / (12.0 * x);
  const double second = 1.0 / (360.0 * x * x * x);
  if (x < detail::kStirlingSeriesThreshold) {
    r.mu = std::lgamma(x) - 0.5 * std::log(2.0 * std::numbers::pi) - (x - 0.5) * std::log(x) + x;
    r.upper_slack = lead - r.mu;
    r.lower_slack = r.mu - (lead - second);
  } else {
    // Truncation error after eight terms is below 1e-18 relative here.
    r.upper_slack = -detail::stirling_tail(x, 1);
    r.lower_slack = detail::stirling_tail(x, 2);
    r.mu = lead + detail::stirling_tail(x, 1);
  }
  return r;
}

/// M = (N-1) μ(k) - Σ_{l=2}^N μ(lk); the density-constant exponent.
inline double exponent_M(int n, double k) {
  if (n < 2) throw std::invalid_argument("exponent_M: N must be >= 2");
  if (!(k >= 1.0)) throw std::invalid_argument("exponent_M: k must be >= 1");
  double m = (n - 1) * stirling_mu(k).mu;
  for (int l = 2; l <= n; ++l) m -= stirling_mu(l * k).mu;
  return m;
}

}  // namespace betafreeze
