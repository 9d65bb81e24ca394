#pragma once

// Small dense/tridiagonal symmetric linear algebra: implicit-shift QL for
// tridiagonal eigenvalues, Householder reduction of dense symmetric
// matrices, Cholesky, and triangular inversion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "betafreeze/errors.hpp"

namespace betafreeze {

/// Row-major square matrix. Used for both symmetric and triangular data.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

  Matrix transposed() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        const double ail = a(i, l);
        if (ail == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += ail * b(l, j);
      }
    return c;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline double max_abs_difference(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal
/// and off-diagonal (off[i] couples rows i and i+1), ascending.
///
/// Implicit QL with Wilkinson-type shifts, no vector accumulation.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> d,
                                                   const std::vector<double>& off,
                                                   int max_iterations_per_value = 60) {
  const std::size_t n = d.size();
  if (n == 0) return d;
  if (off.size() + 1 != n)
    throw std::invalid_argument("tridiagonal_eigenvalues: off-diagonal must have n-1 entries");
  std::vector<double> e(n, 0.0);
  std::copy(off.begin(), off.end(), e.begin());

  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == max_iterations_per_value)
        throw ConvergenceFailure("tridiagonal QL: no convergence for eigenvalue " +
                                 std::to_string(l));

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          // Split: recover and restart the sweep.
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns {diagonal, off-diagonal}. Only the lower triangle is read.
inline std::pair<std::vector<double>, std::vector<double>> householder_tridiagonalize(Matrix a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i);

  std::vector<double> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    const double x0 = a(k + 1, k);
    const double sigma = x0 >= 0.0 ? alpha : -alpha;

    // v = x + sign(x0)|x| e1 over rows k+1..n-1
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] += sigma;
    double vtv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vtv += v[i] * v[i];
    if (vtv == 0.0) continue;

    // p = A v * 2 / vtv on the trailing block
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      p[i] = 2.0 * s / vtv;
    }
    double vtp = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vtp += v[i] * p[i];
    const double kk = vtp / vtv;
    for (std::size_t i = k + 1; i < n; ++i) p[i] -= kk * v[i];  // q
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= v[i] * p[j] + p[i] * v[j];

    a(k + 1, k) = -sigma;
    a(k, k + 1) = -sigma;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
  }
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = a(i + 1, i);
  return {std::move(diag), std::move(off)};
}

/// Eigenvalues of a dense symmetric matrix, ascending.
inline std::vector<double> symmetric_eigenvalues(const Matrix& a) {
  auto [diag, off] = householder_tridiagonalize(a);
  return tridiagonal_eigenvalues(std::move(diag), off);
}

/// Lower Cholesky factor R with R Rᵀ = a.
inline Matrix cholesky_lower(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix r(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t l = 0; l < j; ++l) s -= r(j, l) * r(j, l);
    if (!(s > 0.0))
      throw FactorizationFailure("cholesky: non-positive pivot at row " + std::to_string(j));
    const double rjj = std::sqrt(s);
    r(j, j) = rjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t l = 0; l < j; ++l) t -= r(i, l) * r(j, l);
      r(i, j) = t / rjj;
    }
  }
  return r;
}

/// Inverse of a lower-triangular matrix by forward substitution on unit vectors.
inline Matrix invert_lower(const Matrix& r) {
  const std::size_t n = r.size();
  Matrix inv(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t l = c; l < i; ++l) s -= r(i, l) * inv(l, c);
      inv(i, c) = s / r(i, i);
    }
  }
  return inv;
}

}  // namespace betafreeze
