#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "betafreeze/experiment.hpp"
#include "oracles.hpp"

using namespace betafreeze;
using Catch::Approx;

namespace {

ExperimentConfig config(int n, double k, double eps, std::uint64_t trials, std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.n = n;
  c.k = k;
  c.eps = eps;
  c.trials = trials;
  c.seed = seed;
  return c;
}

// P(g1² + g2²/2 > e²) by quadrature over g2.
double two_point_gaussian_tail(double e) {
  const double edge = std::numbers::sqrt2 * e;
  auto integrand = [e](double g) {
    const double inner = std::sqrt(std::max(0.0, e * e - g * g / 2.0));
    return 2.0 * (1.0 - oracles::normal_cdf(inner)) * std::exp(-g * g / 2.0) /
           std::sqrt(2.0 * std::numbers::pi);
  };
  const double mid = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -edge, edge, 15, 1e-14);
  return mid + 2.0 * (1.0 - oracles::normal_cdf(edge));
}

}  // namespace

TEST_CASE("degenerate thresholds", "[experiment]") {
  CHECK(estimate_tail_l2(config(3, 10.0, 0.0, 2000)).p_hat == 1.0);
  CHECK(estimate_tail_l2(config(3, 10.0, std::numeric_limits<double>::infinity(), 2000)).p_hat == 0.0);
}

TEST_CASE("tail estimates are reproducible and worker invariant", "[experiment]") {
  auto cfg = config(4, 30.0, 0.08, 20000, 123);
  const auto a = estimate_tail_l2(cfg);
  const auto b = estimate_tail_l2(cfg);
  CHECK(a.hits == b.hits);
  cfg.workers = 3;
  const auto c = estimate_tail_l2(cfg);
  CHECK(c.hits == a.hits);
  CHECK(c.ci_low == a.ci_low);
  cfg.seed = 124;
  CHECK(estimate_tail_l2(cfg).hits != a.hits);
}

TEST_CASE("sup-norm event is contained in the l2 event", "[experiment]") {
  for (double eps : {0.02, 0.05, 0.1}) {
    auto cfg = config(5, 50.0, eps, 5000, 9);
    const auto l2 = estimate_tail_l2(cfg);
    const auto sup = estimate_tail_sup(cfg);
    cfg.norm = TailNorm::sup;
    CHECK(estimate_tail(cfg).hits == sup.hits);
    INFO("eps = " << eps);
    CHECK(sup.hits <= l2.hits);
    CHECK(sup.p_hat <= std::min(1.0, dette_imhof_bound(5, std::sqrt(100.0) * eps)));
  }
}

TEST_CASE("per-draw deviation", "[experiment]") {
  const auto z = compute_zeros(2);
  EnsembleSample x;
  x.n = 2;
  x.k = 8.0;
  x.values = {4.0 * z[0] + 0.3, 4.0 * z[1] - 0.4};
  const auto d = deviation(x, z);
  CHECK(d.sup_unscaled == Approx(0.4).epsilon(1e-14));
  CHECK(d.sup_scaled == Approx(0.1).epsilon(1e-14));
  CHECK(d.l2_scaled == Approx(0.125).epsilon(1e-14));
}

TEST_CASE("empirical covariance approaches the Gaussian limit", "[experiment][statistical]") {
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.k = 1e4;
  cfg.trials = 100000;
  cfg.seed = 5;
  const auto r = clt_covariance_test(cfg);
  const auto limit = build_precision(compute_zeros(2)).covariance();
  CHECK(r.cov_rel_err <= 0.03);
  // Per-coordinate means are O(1/√trials) plus an O(1/√k) drift.
  CHECK(r.mean_norm <= 5.0 * std::sqrt(limit(0, 0) + limit(1, 1)) / std::sqrt(1e5) + 0.05);
  cfg.workers = 2;
  CHECK(clt_covariance_test(cfg).cov_rel_err == Approx(r.cov_rel_err).epsilon(1e-9));
}

TEST_CASE("Gaussian reference tail", "[experiment][statistical]") {
  const double e = 1.3;
  const auto t = gaussian_reference_tail(2, e, 200000, 17);
  const double exact = two_point_gaussian_tail(e);
  CHECK(t.ci_low <= exact);
  CHECK(exact <= t.ci_high);
  for (double eps : {2.0, 2.5, 3.0}) {
    const auto g = gaussian_reference_tail(4, eps, 100000, 18);
    INFO("eps = " << eps);
    CHECK(g.ci_low <= gaussian_tail_bound(4, eps));
  }
  CHECK(gaussian_reference_tail(3, 0.0, 100, 1).p_hat == 1.0);
  CHECK_THROWS_AS(gaussian_reference_tail(1, 1.0, 10, 1), InvalidConfig);
}

TEST_CASE("sweep output", "[experiment]") {
  SweepGrid g;
  g.trials = 500;
  g.seed = 3;
  std::ostringstream empty;
  CHECK(sweep(g, empty).empty());
  CHECK(empty.str() == "# betafreeze sweep trials=500 seed=3 workers=1 confidence=0.98999999999999999\n" +
                           std::string(kSweepHeader) + "\n");

  g.ns = {2, 3};
  g.ks = {100.0, 1e4};
  g.cs = {1.0};
  std::ostringstream out;
  const auto rows = sweep(g, out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].n == 2);
  CHECK(rows[1].k == 1e4);
  CHECK(rows[2].n == 3);
  for (const auto& r : rows) {
    CHECK(r.eps == Approx(eps_from_c(r.k, 1.0)));
    CHECK(r.prop_tighter == (r.prop.total < r.di_bound));
  }
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    if (lines > 2) CHECK(std::count(line.begin(), line.end(), ',') == 19);
  }
  CHECK(lines == 6);
  std::ostringstream again;
  sweep(g, again);
  CHECK(again.str() == out.str());

  g.ks = {1.0};
  std::ostringstream bad;
  CHECK_THROWS_AS(sweep(g, bad), InvalidConfig);
}

TEST_CASE("configuration validation", "[experiment]") {
  auto cfg = config(1, 10.0, 0.1, 10);
  CHECK_THROWS_AS(estimate_tail_l2(cfg), InvalidConfig);
  cfg = config(2, -1.0, 0.1, 10);
  CHECK_THROWS_AS(estimate_tail_l2(cfg), InvalidConfig);
  cfg = config(2, 10.0, 0.1, 0);
  CHECK_THROWS_AS(estimate_tail_l2(cfg), InvalidConfig);
  cfg = config(2, 10.0, 0.1, 10);
  cfg.c = 1.0;
  CHECK_THROWS_AS(estimate_tail_l2(cfg), InvalidConfig);
  cfg.eps.reset();
  cfg.c.reset();
  CHECK_THROWS_AS(estimate_tail_l2(cfg), InvalidConfig);
  cfg.workers = 0;
  cfg.eps = 0.1;
  CHECK_THROWS_AS(estimate_tail_l2(cfg), InvalidConfig);
}
