#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "betafreeze/rng.hpp"
#include "oracles.hpp"

using betafreeze::SeedStream;

TEST_CASE("seed streams are deterministic and distinct", "[rng]") {
  SeedStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);

  const auto s1 = SeedStream(1, 0).split(3);
  const auto s2 = SeedStream(1, 0).split(3);
  auto x = s1, y = s2;
  CHECK(x() == y());
  auto z = SeedStream(1, 0).split(4);
  auto w = SeedStream(1, 0).split(3);
  CHECK(z() != w());
}

TEST_CASE("uniform and normal variates have the right moments", "[rng][statistical]") {
  SeedStream rng(2024);
  constexpr int kDraws = 400000;
  std::vector<double> u(kDraws), g(kDraws);
  for (int i = 0; i < kDraws; ++i) {
    u[i] = rng.uniform();
    REQUIRE(u[i] > 0.0);
    REQUIRE(u[i] < 1.0);
  }
  for (int i = 0; i < kDraws; ++i) g[i] = rng.normal();
  CHECK(oracles::ks_p_value(u, [](double x) { return x; }) > 1e-3);
  CHECK(oracles::ks_p_value(g, oracles::normal_cdf) > 1e-3);
  const auto m = oracles::mean_and_error(g);
  CHECK(std::abs(m.mean) < 4.0 * m.std_error);
  CHECK(std::abs(oracles::sample_variance(g) - 1.0) < 0.01);
}
