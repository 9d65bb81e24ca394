#pragma once

// Explicit finite-(N, k, ε) tail bounds for the scaled distance
// ‖X_{k,N}/√(2k) - z_N‖₂ and the comparison sup-norm bound.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "betafreeze/errors.hpp"

namespace betafreeze {

/// Right-hand side of the main tail bound, term by term.
struct BoundBreakdown {
  double term_quartic = 0.0;   // (32/3) ε⁴ k N³
  double term_stirling = 0.0;  // (N-1) / (26k)
  double e_factor = 0.0;       // E = exp(term_stirling - term_quartic)
  double term_gaussian = 0.0;  // E (√e √N / 2) (2kε² + 1) e^{-kε²}
  double total = 0.0;
  double total_clamped = 0.0;
  bool condition_ok = false;
};

namespace detail {

inline void require_bound_args(int n, double k, double eps, const char* who) {
  if (n < 2) throw std::invalid_argument(std::string(who) + ": N must be >= 2");
  if (!(k >= 1.0)) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument(std::string(who) + ": eps must be positive");
}

}  // namespace detail

/// √((1 + ln N)/(2k)) ≤ ε ≤ 1/(2√N).
inline bool prop_condition(int n, double k, double eps) {
  detail::require_bound_args(n, k, eps, "prop_condition");
  const double lower = std::sqrt((1.0 + std::log(static_cast<double>(n))) / (2.0 * k));
  const double upper = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  return lower <= eps && eps <= upper;
}

/// Evaluates the bound for any admissible (N, k, ε); condition_ok reports
/// whether the validity window holds. E and e^{-kε²} are combined in log
/// space.
inline BoundBreakdown prop_bound(int n, double k, double eps) {
  detail::require_bound_args(n, k, eps, "prop_bound");
  const double nd = static_cast<double>(n);
  const double eps2 = eps * eps;
  BoundBreakdown b;
  b.term_quartic = (32.0 / 3.0) * eps2 * eps2 * k * nd * nd * nd;
  b.term_stirling = (nd - 1.0) / (26.0 * k);
  const double log_e = b.term_stirling - b.term_quartic;
  b.e_factor = std::exp(log_e);
  const double k_eps2 = k * eps2;
  const double log_gauss = log_e + 0.5 + 0.5 * std::log(nd) - std::numbers::ln2 +
                           std::log1p(2.0 * k_eps2) - k_eps2;
  b.term_gaussian = std::exp(log_gauss);
  b.total = b.term_quartic - b.term_stirling + b.term_gaussian;
  b.total_clamped = std::clamp(b.total, 0.0, 1.0);
  b.condition_ok = prop_condition(n, k, eps);
  return b;
}

/// Scaled threshold ε = c √(ln k / k).
inline double eps_from_c(double k, double c) { return c * std::sqrt(std::log(k) / k); }

/// √((1 + ln N)/(2 ln k)) ≤ c ≤ ½ √(k / (N ln k)), for k > 1.
inline bool cor_condition(int n, double k, double c) {
  const double lk = std::log(k);
  const double lower = std::sqrt((1.0 + std::log(static_cast<double>(n))) / (2.0 * lk));
  const double upper = 0.5 * std::sqrt(k / (n * lk));
  return lower <= c && c <= upper;
}

/// Bound in terms of c at ε = c√(ln k / k), without the window check:
/// (32/3) c⁴ N³ (ln k)²/k + (√e N / 2)(2c² ln k + 1) k^{-c²}.
inline double cor_bound_value(int n, double k, double c) {
  if (n < 2) throw std::invalid_argument("cor_bound: N must be >= 2");
  if (!(k > 1.0)) throw std::invalid_argument("cor_bound: k must exceed 1");
  if (!(c > 0.0)) throw std::invalid_argument("cor_bound: c must be positive");
  const double nd = static_cast<double>(n);
  const double lk = std::log(k);
  const double c2 = c * c;
  const double quartic = (32.0 / 3.0) * c2 * c2 * nd * nd * nd * lk * lk / k;
  const double gaussian =
      std::exp(0.5 + std::log(nd) - std::numbers::ln2 + std::log1p(2.0 * c2 * lk) - c2 * lk);
  return quartic + gaussian;
}

/// As cor_bound_value, but requires N ≥ 2, k ≥ e and c inside its window.
inline double cor_bound(int n, double k, double c) {
  if (!(k >= std::numbers::e)) throw ConditionViolated("cor_bound: requires k >= e");
  if (!(c > 0.0) || !cor_condition(n, k, c))
    throw ConditionViolated("cor_bound: c outside its validity window");
  return cor_bound_value(n, k, c);
}

/// Sup-norm bound 4N e^{-ε²/18} on the unscaled deviation.
inline double dette_imhof_bound(int n, double eps_unscaled) {
  if (n < 2) throw std::invalid_argument("dette_imhof_bound: N must be >= 2");
  if (!(eps_unscaled >= 0.0))
    throw std::invalid_argument("dette_imhof_bound: eps must be non-negative");
  return 4.0 * n * std::exp(-eps_unscaled * eps_unscaled / 18.0);
}

/// φ(δ) = e^{rδ} / (1 - 2δ) on [0, 1/2).
inline double phi(double r, double delta) {
  if (!(delta >= 0.0 && delta < 0.5)) return std::numeric_limits<double>::infinity();
  return std::exp(r * delta - std::log1p(-2.0 * delta));
}

/// Minimizer of φ over [0, 1/2): 0 when r ≥ -2, otherwise 1/2 + 1/r.
inline double optimize_delta(double r) {
  if (r >= -2.0) return 0.0;
  return 0.5 + 1.0 / r;
}

/// Chernoff-type bound on P(‖X̃‖₂ > ε) for X̃ ~ N(0, diag(1, 1/2, ..., 1/N)):
/// min over δ of e^{(-ε² - 1 + ln N)δ} / (1 - 2δ).
inline double gaussian_tail_bound(int n, double eps) {
  if (n < 2) throw std::invalid_argument("gaussian_tail_bound: N must be >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("gaussian_tail_bound: eps must be positive");
  const double r = -eps * eps - 1.0 + std::log(static_cast<double>(n));
  return phi(r, optimize_delta(r));
}

}  // namespace betafreeze
