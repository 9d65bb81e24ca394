#pragma once

// Monte Carlo experiments around the freezing limit: tail probabilities
// with exact binomial intervals, the empirical CLT covariance, the
// Gaussian reference tail, and the bound-comparison sweep.
//
// Trial t always draws from SeedStream(seed, t). Workers take contiguous
// blocks of trials and partial results are reduced in block order, so a
// fixed (seed, workers) pair reproduces bit-identical results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "betafreeze/bounds.hpp"
#include "betafreeze/errors.hpp"
#include "betafreeze/hermite.hpp"
#include "betafreeze/rng.hpp"
#include "betafreeze/sampler.hpp"
#include "betafreeze/spectral.hpp"
#include "betafreeze/stats.hpp"

namespace betafreeze {

enum class TailNorm { l2, sup };

struct ExperimentConfig {
  int n = 2;
  double k = 1.0;
  std::optional<double> eps;  // scaled ℓ2 threshold
  std::optional<double> c;    // alternatively ε = c √(ln k / k)
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double confidence = kDefaultConfidence;
  TailNorm norm = TailNorm::l2;

  void validate() const {
    if (n < 2) throw InvalidConfig("n must be >= 2");
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidConfig("k must be positive and finite");
    if (trials < 1) throw InvalidConfig("trials must be >= 1");
    if (workers < 1) throw InvalidConfig("workers must be >= 1");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidConfig("confidence must lie in (0,1)");
    if (eps && c) throw InvalidConfig("give either eps or c, not both");
    if (eps && !(*eps >= 0.0)) throw InvalidConfig("eps must be non-negative");
    if (c && !(*c > 0.0)) throw InvalidConfig("c must be positive");
    if (c && !(k > 1.0)) throw InvalidConfig("c requires k > 1");
  }

  /// The scaled threshold ε; requires eps or c.
  double scaled_eps() const {
    if (eps) return *eps;
    if (c) return eps_from_c(k, *c);
    throw InvalidConfig("a threshold (eps or c) is required");
  }
};

namespace detail {

/// Runs fn(begin, end) over `workers` contiguous blocks of [0, trials) and
/// returns the partial results in block order.
template <class Fn>
auto run_blocks(std::uint64_t trials, unsigned workers, Fn fn)
    -> std::vector<decltype(fn(std::uint64_t{}, std::uint64_t{}))> {
  using Partial = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  const std::uint64_t w = std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, trials));
  std::vector<Partial> partials(w);
  std::vector<std::exception_ptr> errors(w);
  auto block = [&](std::uint64_t b) {
    const std::uint64_t begin = trials * b / w;
    const std::uint64_t end = trials * (b + 1) / w;
    try {
      partials[b] = fn(begin, end);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  if (w == 1) {
    block(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::uint64_t b = 0; b < w; ++b) threads.emplace_back(block, b);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return partials;
}

}  // namespace detail

/// Deviation of one ensemble draw from the frozen configuration.
struct Deviation {
  double l2_scaled;     // ‖X/√(2k) - z‖₂
  double sup_unscaled;  // ‖X - √(2k) z‖∞
  double sup_scaled;    // ‖X/√(2k) - z‖∞
};

inline Deviation deviation(const EnsembleSample& x, const HermiteZeros& z) {
  const double root = std::sqrt(2.0 * x.k);
  Deviation d{0.0, 0.0, 0.0};
  double ss = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const double scaled = x.values[i] / root - z[i];
    ss += scaled * scaled;
    d.sup_scaled = std::max(d.sup_scaled, std::abs(scaled));
    d.sup_unscaled = std::max(d.sup_unscaled, std::abs(x.values[i] - root * z[i]));
  }
  d.l2_scaled = std::sqrt(ss);
  return d;
}

namespace detail {

inline TailEstimate estimate_tail(const ExperimentConfig& cfg, TailNorm norm) {
  cfg.validate();
  const double eps = cfg.scaled_eps();
  const double threshold = norm == TailNorm::l2 ? eps : std::sqrt(2.0 * cfg.k) * eps;
  const HermiteZeros z = compute_zeros(cfg.n);
  const auto partials = run_blocks(cfg.trials, cfg.workers, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = b; t < e; ++t) {
      SeedStream rng(cfg.seed, t);
      const Deviation d = deviation(sample_ensemble(cfg.n, cfg.k, rng), z);
      const double dist = norm == TailNorm::l2 ? d.l2_scaled : d.sup_unscaled;
      if (dist > threshold) ++hits;
    }
    return hits;
  });
  std::uint64_t hits = 0;
  for (auto h : partials) hits += h;
  return clopper_pearson(hits, cfg.trials, cfg.confidence);
}

}  // namespace detail

/// P(‖X/√(2k) - z_N‖₂ > ε).
inline TailEstimate estimate_tail_l2(const ExperimentConfig& cfg) {
  return detail::estimate_tail(cfg, TailNorm::l2);
}

/// P(‖X - √(2k) z_N‖∞ > √(2k) ε), the unscaled sup-norm event at the
/// converted threshold.
inline TailEstimate estimate_tail_sup(const ExperimentConfig& cfg) {
  return detail::estimate_tail(cfg, TailNorm::sup);
}

inline TailEstimate estimate_tail(const ExperimentConfig& cfg) {
  return detail::estimate_tail(cfg, cfg.norm);
}

struct CltReport {
  int n = 0;
  double k = 0.0;
  std::uint64_t trials = 0;
  double mean_norm = 0.0;    // ‖empirical mean of Y‖₂, Y = X - √(2k) z
  double cov_rel_err = 0.0;  // ‖Ĉ - Σ_N‖_F / ‖Σ_N‖_F
  std::vector<double> mean;
  Matrix covariance;
};

inline CltReport clt_covariance_test(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.trials < 2) throw InvalidConfig("clt needs at least two trials");
  const HermiteZeros z = compute_zeros(cfg.n);
  const PrecisionSpectralPair limit = build_precision(z);
  const double root = std::sqrt(2.0 * cfg.k);
  const auto partials = detail::run_blocks(cfg.trials, cfg.workers, [&](std::uint64_t b, std::uint64_t e) {
    RunningMoments acc(static_cast<std::size_t>(cfg.n));
    std::vector<double> y(cfg.n);
    for (std::uint64_t t = b; t < e; ++t) {
      SeedStream rng(cfg.seed, t);
      const auto x = sample_ensemble(cfg.n, cfg.k, rng);
      for (int i = 0; i < cfg.n; ++i) y[i] = x.values[i] - root * z[i];
      acc.add(y);
    }
    return acc;
  });
  RunningMoments total(static_cast<std::size_t>(cfg.n));
  for (const auto& p : partials) total.merge(p);

  CltReport r;
  r.n = cfg.n;
  r.k = cfg.k;
  r.trials = cfg.trials;
  r.mean = total.mean();
  double m2 = 0.0;
  for (double m : r.mean) m2 += m * m;
  r.mean_norm = std::sqrt(m2);
  r.covariance = total.covariance();
  const Matrix sigma = limit.covariance();
  Matrix diff(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i)
    for (std::size_t j = 0; j < sigma.size(); ++j) diff(i, j) = r.covariance(i, j) - sigma(i, j);
  r.cov_rel_err = frobenius_norm(diff) / frobenius_norm(sigma);
  return r;
}

/// Monte Carlo tail of ‖X̃‖₂ for X̃ ~ N(0, diag(1, 1/2, ..., 1/N)).
inline TailEstimate gaussian_reference_tail(int n, double eps, std::uint64_t trials,
                                            std::uint64_t seed, unsigned workers = 1,
                                            double confidence = kDefaultConfidence) {
  if (n < 2) throw InvalidConfig("n must be >= 2");
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  const double eps2 = eps * eps;
  const auto partials = detail::run_blocks(trials, workers, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = b; t < e; ++t) {
      SeedStream rng(seed, t);
      double s = 0.0;
      for (int l = 1; l <= n; ++l) {
        const double g = rng.normal();
        s += g * g / l;
      }
      if (s > eps2) ++hits;
    }
    return hits;
  });
  std::uint64_t hits = 0;
  for (auto h : partials) hits += h;
  return clopper_pearson(hits, trials, confidence);
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepGrid {
  std::vector<int> ns;
  std::vector<double> ks;
  std::vector<double> cs;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double confidence = kDefaultConfidence;
};

struct SweepRow {
  int n = 0;
  double k = 0.0;
  double c = 0.0;
  double eps = 0.0;
  TailEstimate empirical;
  BoundBreakdown prop;
  double cor_bound = 0.0;
  double di_eps_unscaled = 0.0;
  double di_bound = 0.0;
  bool prop_tighter = false;
};

inline constexpr const char* kSweepHeader =
    "N,k,c,eps,trials,hits,p_hat,ci_low,ci_high,prop_term_quartic,prop_term_stirling,"
    "prop_e_factor,prop_term_gaussian,prop_total,prop_total_clamped,condition_ok,cor_bound,"
    "di_eps_unscaled,di_bound,tighter";

/// Shortest round-trip-safe text for a double (17 significant digits).
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline SweepRow sweep_point(int n, double k, double c, const SweepGrid& grid) {
  if (!(k > 1.0)) throw InvalidConfig("sweep: k must exceed 1");
  SweepRow row;
  row.n = n;
  row.k = k;
  row.c = c;
  row.eps = eps_from_c(k, c);
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.eps = row.eps;
  cfg.trials = grid.trials;
  cfg.seed = grid.seed;
  cfg.workers = grid.workers;
  cfg.confidence = grid.confidence;
  row.empirical = estimate_tail_l2(cfg);
  row.prop = prop_bound(n, k, row.eps);
  row.cor_bound = cor_bound_value(n, k, c);
  row.di_eps_unscaled = std::sqrt(2.0 * k) * row.eps;
  row.di_bound = dette_imhof_bound(n, row.di_eps_unscaled);
  row.prop_tighter = row.prop.total < row.di_bound;
  return row;
}

inline void write_sweep_row(std::ostream& os, const SweepRow& r) {
  os << r.n << ',' << format_real(r.k) << ',' << format_real(r.c) << ',' << format_real(r.eps)
     << ',' << r.empirical.trials << ',' << r.empirical.hits << ',' << format_real(r.empirical.p_hat)
     << ',' << format_real(r.empirical.ci_low) << ',' << format_real(r.empirical.ci_high) << ','
     << format_real(r.prop.term_quartic) << ',' << format_real(r.prop.term_stirling) << ','
     << format_real(r.prop.e_factor) << ',' << format_real(r.prop.term_gaussian) << ','
     << format_real(r.prop.total) << ',' << format_real(r.prop.total_clamped) << ','
     << (r.prop.condition_ok ? "true" : "false") << ',' << format_real(r.cor_bound) << ','
     << format_real(r.di_eps_unscaled) << ',' << format_real(r.di_bound) << ','
     << (r.prop_tighter ? "prop" : "di") << '\n';
}

inline void write_sweep_provenance(std::ostream& os, const SweepGrid& g) {
  os << "# betafreeze sweep trials=" << g.trials << " seed=" << g.seed
     << " workers=" << g.workers << " confidence=" << format_real(g.confidence) << '\n';
}

/// Writes provenance, header and one row per (N, k, c) point in grid order.
/// Rows already written are flushed before a failing point's error propagates.
inline std::vector<SweepRow> sweep(const SweepGrid& grid, std::ostream& os) {
  if (grid.trials < 1) throw InvalidConfig("sweep: trials must be >= 1");
  if (grid.workers < 1) throw InvalidConfig("sweep: workers must be >= 1");
  if (!(grid.confidence > 0.0 && grid.confidence < 1.0))
    throw InvalidConfig("sweep: confidence must lie in (0,1)");
  for (int n : grid.ns)
    if (n < 2) throw InvalidConfig("sweep: every N must be >= 2");
  for (double k : grid.ks)
    if (!(k > 1.0)) throw InvalidConfig("sweep: every k must exceed 1");
  for (double c : grid.cs)
    if (!(c > 0.0)) throw InvalidConfig("sweep: every c must be positive");

  write_sweep_provenance(os, grid);
  os << kSweepHeader << '\n';
  std::vector<SweepRow> rows;
  try {
    for (int n : grid.ns)
      for (double k : grid.ks)
        for (double c : grid.cs) {
          rows.push_back(sweep_point(n, k, c, grid));
          write_sweep_row(os, rows.back());
        }
  } catch (...) {
    os.flush();
    throw;
  }
  os.flush();
  return rows;
}

}  // namespace betafreeze
