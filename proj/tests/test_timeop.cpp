#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qdecay/timeop.hpp"

using namespace qdecay;
using Catch::Approx;

TEST_CASE("t0_apply") {
  SECTION("m = 2 family matches the symbolic derivative") {
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const double N2 = g2.gaussian()->amp;
    const double ks[] = {-2.0, -0.7, 0.3, 1.1, 2.4};
    const auto vals = t0_apply(g2, ks);
    for (std::size_t i = 0; i < std::size(ks); ++i) {
      const double k = ks[i];
      const Complex want =
          Complex{0.0, N2 / 4.0} * (3.0 - 2.0 * k * k) * std::exp(-0.5 * k * k);
      REQUIRE(std::abs(vals[i] - want) < 1e-12);
      // finite-difference cross-check of (i/4)(2 psi_hat'/k - psi_hat/k^2)
      auto f = [&](double q) { return g2.psi_hat(q); };
      const double h = 1e-4;
      const Complex dnum = (f(k + h) - f(k - h)) / (2.0 * h);
      const Complex fd =
          Complex{0.0, 0.25} * (2.0 * dnum / k - f(k) / (k * k));
      REQUIRE(std::abs(vals[i] - fd) < 1e-6);
    }
  }

  SECTION("image parity follows psi_hat parity") {
    // both 1/k d/dk and d/dk(./k) preserve parity, so the image of an even
    // psi_hat is even and of an odd psi_hat is odd
    const auto g2 = WaveFunction::gaussian_family(2, 0.9);
    const auto g1 = WaveFunction::gaussian_family(1, 0.9);
    const double ks[] = {0.4, 1.3, 2.2};
    const double neg[] = {-0.4, -1.3, -2.2};
    const auto even_p = t0_apply(g2, ks);
    const auto even_m = t0_apply(g2, neg);
    const auto odd_p = t0_apply(g1, ks);
    const auto odd_m = t0_apply(g1, neg);
    for (std::size_t i = 0; i < std::size(ks); ++i) {
      REQUIRE(std::abs(even_m[i] - even_p[i]) < 1e-13);
      REQUIRE(std::abs(odd_m[i] + odd_p[i]) < 1e-13);
    }
  }

  SECTION("1/(4k^2) blow-up controlled by psi_hat(0) for m = 0") {
    const auto g0 = WaveFunction::gaussian_family(0, 0.7);
    const double amp0 = std::abs(g0.psi_hat(0.0));
    for (double k : {1e-3, 1e-4}) {
      const double ks[] = {k};
      const double got = std::abs(t0_apply(g0, ks)[0]);
      REQUIRE(got == Approx(amp0 / (4.0 * k * k)).epsilon(1e-2));
    }
  }

  SECTION("grid containing k = 0 is rejected") {
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const double ks[] = {-1.0, 0.0, 1.0};
    REQUIRE_THROWS_AS(t0_apply(g2, ks), std::invalid_argument);
  }

  SECTION("sampled states agree with the closed form") {
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const auto mg = to_momentum(g2, GridSpec{-8.0, 0.01, 1601});
    const double ks[] = {-1.5, 0.5, 2.0};
    const auto a = t0_apply(g2, ks);
    const auto b = t0_apply(mg, ks);
    for (std::size_t i = 0; i < std::size(ks); ++i)
      REQUIRE(std::abs(a[i] - b[i]) < 1e-6);
  }
}

TEST_CASE("t0_norm") {
  SECTION("m = 2 at a0 = 1/2: norm = 1/sqrt(2) from the Gaussian oracle") {
    // int (3 - 2k^2)^2 e^{-k^2} dk = 6 sqrt(pi), N_2^2 = 4/(3 sqrt(pi)),
    // so norm^2 = 6 sqrt(pi) * N_2^2 / 16 = 1/2.
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const auto rep = t0_norm(g2);
    REQUIRE(rep.finite);
    REQUIRE(rep.norm_value == Approx(1.0 / std::sqrt(2.0)).margin(1e-8));
  }

  SECTION("m = 0 and m = 1 are not finite") {
    for (int m : {0, 1}) {
      const auto rep = t0_norm(WaveFunction::gaussian_family(m, 0.6));
      REQUIRE_FALSE(rep.finite);
      REQUIRE(std::isinf(rep.norm_value));
    }
  }

  SECTION("finiteness tracks the zero-momentum order on all built-ins") {
    for (int m : {0, 1, 2, 3, 4}) {
      const auto g = WaveFunction::gaussian_family(m, 0.5);
      const auto rep = t0_norm(g);
      const auto order = zero_momentum_order(g, 1e-10);
      REQUIRE(rep.finite == (*order >= 2));
    }
    const auto b = WaveFunction::momentum_bump(2.0, 1.0);
    REQUIRE(t0_norm(b).finite);  // vanishes identically near k = 0
  }

  SECTION("position-grid states are transformed before classification") {
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const auto pg = to_position(g2, GridSpec{-12.0, 0.02, 1201});
    const auto rep = t0_norm(pg);
    REQUIRE(rep.finite);
    REQUIRE(rep.norm_value == Approx(1.0 / std::sqrt(2.0)).margin(1e-4));
  }

  SECTION("singular terms expose psi_hat(0) and psi_hat'(0)") {
    const auto g0 = WaveFunction::gaussian_family(0, 0.5);
    const auto rep = t0_norm(g0);
    REQUIRE(std::abs(rep.psi_hat_zero - Complex{std::pow(kPi, -0.25), 0.0}) < 1e-12);
    const auto g1 = WaveFunction::gaussian_family(1, 0.5);
    const auto rep1 = t0_norm(g1);
    REQUIRE(std::abs(rep1.psi_hat_zero) < 1e-14);
    REQUIRE(std::abs(rep1.psi_hat_prime_zero) ==
            Approx(std::sqrt(2.0 / kSqrtPi)).epsilon(1e-12));
  }
}

TEST_CASE("decay bound") {
  SECTION("m = 2 at t = 1: |A|^2 = 2^{-5/2} <= 2") {
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const auto s = survival_series(g2, {1.0});
    REQUIRE(std::exp(s.log_abs2[0]) ==
            Approx(std::pow(2.0, -2.5)).epsilon(1e-10));
    const auto ok = check_decay_bound(g2, s);
    REQUIRE(ok[0]);
  }

  SECTION("bound slack grows at large t") {
    const auto g2 = WaveFunction::gaussian_family(2, 0.5);
    const auto rep = t0_norm(g2);
    const auto s = survival_series(g2, make_time_grid(1.0, 1e4, 16, true));
    const auto ok = check_decay_bound(g2, s);
    double prev_ratio = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      REQUIRE(ok[i]);
      const double rhs =
          4.0 * rep.norm_value * rep.norm_value / (s.times[i] * s.times[i]);
      const double ratio = rhs / std::exp(s.log_abs2[i]);
      REQUIRE(ratio > prev_ratio);  // t^{-2} vs t^{-5}
      prev_ratio = ratio;
    }
  }

  SECTION("vacuous for infinite norm") {
    const auto g0 = WaveFunction::gaussian_family(0, 0.5);
    const auto s = survival_series(g0, {1.0, 2.0});
    REQUIRE_THROWS_WITH(check_decay_bound(g0, s),
                        Catch::Matchers::ContainsSubstring("vacuous"));
  }

  SECTION("holds on every point for every finite-norm state") {
    for (int m : {2, 3, 4}) {
      const auto g = WaveFunction::gaussian_family(m, 0.5);
      const auto s = survival_series(g, make_time_grid(0.5, 1e3, 12, true));
      for (bool ok : check_decay_bound(g, s)) REQUIRE(ok);
    }
    const auto b = WaveFunction::momentum_bump(2.0, 1.0);
    const auto s = survival_series(b, make_time_grid(1.0, 1e3, 10, true));
    for (bool ok : check_decay_bound(b, s)) REQUIRE(ok);
  }
}
