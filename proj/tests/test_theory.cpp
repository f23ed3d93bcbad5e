#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

#include "hgsim/numerics.hpp"
#include "hgsim/theory.hpp"

using namespace hgsim;

namespace {

// Simpson's rule on [a,b]; intervals doubled until two refinements agree.
// Good to ~1e-12 on the smooth integrands below.
double simpson(const std::function<double(double)>& f, double a, double b) {
  double prev = 0.0;
  for (int k = 8; k <= 20; ++k) {
    const std::size_t n = std::size_t{1} << k;  // even
    const double h = (b - a) / double(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * double(i)) * (i % 2 ? 4.0 : 2.0);
    s *= h / 3.0;
    if (k > 8 && std::abs(s - prev) < 1e-13 * (1 + std::abs(s))) return s;
    prev = s;
  }
  return prev;
}

double phi(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2 * 3.14159265358979323846); }

}  // namespace

TEST_CASE("rho solver fixed points") {
  // Reference roots from an independent high-precision Newton solve of
  // rho = exp(c (rho^{d-1} - 1)); each satisfies the equation to < 1e-15.
  CHECK(solve_rho(2.0, 2) == doctest::Approx(0.203187870).epsilon(1e-7));
  CHECK(solve_rho(2.0, 3) == doctest::Approx(0.140809805).epsilon(1e-7));
  CHECK(solve_rho(1.8, 2) == doctest::Approx(0.267570033).epsilon(1e-7));
  CHECK(solve_rho(1.5, 3) == doctest::Approx(0.243967640).epsilon(1e-7));
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 50; ++i) {
      const double c = 1.0 / (d - 1) + 0.1 + i * (10.0 - 1.0 / (d - 1) - 0.1) / 49.0;
      const double rho = solve_rho(c, d);
      REQUIRE(rho > 0.0);
      REQUIRE(rho < 1.0);
      REQUIRE(std::abs(rho - std::exp(c * (std::pow(rho, d - 1) - 1.0))) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(solve_rho(0.9, 2), std::domain_error);  // at/below 1/(d-1)
  CHECK_THROWS_AS(solve_rho(0.5, 3), std::domain_error);
  CHECK_THROWS_AS(solve_rho(2.0, 1), std::invalid_argument);
}

TEST_CASE("model parameter conversions") {
  const ModelParams m = ModelParams::from_c(10000, 2, 2.0);
  CHECK(m.p == doctest::Approx(2.0 / 9999.0).epsilon(1e-12));
  const ModelParams back = ModelParams::from_p(10000, 2, m.p);
  CHECK(back.c == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.critical_c() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.supercritical());
  CHECK_FALSE(ModelParams::from_c(10000, 2, 0.5).supercritical());
  CHECK_THROWS_AS(ModelParams::from_c(10, 1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::from_p(10, 2, 1.5), std::invalid_argument);
}

TEST_CASE("giant component prediction values") {
  const GiantPrediction a = predict(ModelParams::from_c(10000, 2, 2.0));
  CHECK(a.mu == doctest::Approx(7968.1).epsilon(2e-5));
  CHECK(a.sigma2 == doctest::Approx(4594.4).epsilon(5e-5));

  // d=2 closed form rho(1-rho)n/(1-c rho)^2 must match the general formula
  for (double c : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const GiantPrediction g = predict(ModelParams::from_c(50000, 2, c));
    const double rho = g.rho;
    const double ref = rho * (1 - rho) * 50000 / ((1 - c * rho) * (1 - c * rho));
    CHECK(g.sigma2 == doctest::Approx(ref).epsilon(1e-12));
  }

  CHECK(predict(ModelParams::from_c(10000, 3, 2.0)).sigma2 / 10000 ==
        doctest::Approx(0.2232).epsilon(5e-4));
  CHECK(predict(ModelParams::from_c(10000, 3, 1.5)).sigma2 / 10000 ==
        doctest::Approx(0.4735).epsilon(5e-4));

  const GiantPrediction r1 = predict(ModelParams::from_c(20000, 2, 1.8));
  CHECK(r1.mu == doctest::Approx(14648.5993).epsilon(1e-7));  // (1 - 0.267570033) * 2e4
  CHECK(r1.sigma() == doctest::Approx(120.8).epsilon(1e-3));
}

TEST_CASE("local probability normalizes as a Riemann sum") {
  for (double sigma : {10.0, 25.0, 67.78}) {
    const double mu = 500.0;
    double total = 0.0;
    for (long v = long(mu - 12 * sigma); v <= long(mu + 12 * sigma); ++v) {
      total += local_probability(double(v), mu, sigma);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(local_probability(100.0, 100.0, 10.0) ==
        doctest::Approx(1.0 / std::sqrt(2 * 3.14159265358979323846 * 100.0))
            .epsilon(1e-12));
  CHECK_THROWS_AS(local_probability(0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("interval probability against a quadrature oracle") {
  CHECK(interval_probability(0.0, 1e9) == doctest::Approx(0.5).epsilon(1e-12));
  const double oracle = simpson(phi, -1.96, 1.96);
  CHECK(oracle == doctest::Approx(0.9500042).epsilon(1e-6));  // sanity on the oracle itself
  CHECK(interval_probability(-1.96, 1.96) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(interval_probability(-1.0, 2.5) ==
        doctest::Approx(simpson(phi, -1.0, 2.5)).epsilon(1e-10));
  CHECK_THROWS_AS(interval_probability(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("binomial local approximation values") {
  CHECK(binomial_local_approx(100, 0.5, 50) == doctest::Approx(0.0797885).epsilon(2e-6));
  CHECK(binomial_local_approx(400, 0.25, 100) ==
        doctest::Approx(1.0 / std::sqrt(2 * 3.14159265358979323846 * 75.0))
            .epsilon(1e-12));
  CHECK(binomial_local_approx(10000, 0.3, 3000) == doctest::Approx(0.008706).epsilon(2e-4));
  CHECK_THROWS_AS(binomial_local_approx(100, 0.0, 0), std::domain_error);
  CHECK_THROWS_AS(binomial_local_approx(100, 1.0, 100), std::domain_error);
}

TEST_CASE("exact binomial pmf against 128-bit rationals") {
  // p = 1/2 makes the exact pmf a binomial coefficient over a power of two
  for (std::uint64_t n : {10ULL, 30ULL, 60ULL, 100ULL}) {
    for (std::uint64_t x = 0; x <= n; x += 7) {
      const double ref =
          binom(n, x).as_double() * std::exp2(-static_cast<double>(n));
      CHECK(binomial_exact_pmf(n, 0.5, x) == doctest::Approx(ref).epsilon(1e-11));
    }
  }
  CHECK(binomial_exact_pmf(100, 0.5, 50) == doctest::Approx(0.0795892).epsilon(2e-6));
  // full-distribution normalization
  double total = 0.0;
  for (std::uint64_t x = 0; x <= 300; ++x) total += binomial_exact_pmf(300, 0.37, x);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("chernoff bound value and domination of exact tails") {
  CHECK(chernoff_bound(100, 0.5, 20) == doctest::Approx(0.05875).epsilon(2e-4));
  CHECK_THROWS_AS(chernoff_bound(100, 0.5, 0), std::invalid_argument);

  for (const std::uint64_t nu : {1ULL, 2ULL, 3ULL, 5ULL, 8ULL, 13ULL, 21ULL, 34ULL,
                                 55ULL, 89ULL, 144ULL, 200ULL}) {
    for (const double q : {0.1, 0.5, 0.9}) {
      const double mean = double(nu) * q;
      for (std::uint64_t t = 1; t <= nu; ++t) {
        double tail = 0.0;
        for (std::uint64_t x = 0; x <= nu; ++x) {
          if (std::abs(double(x) - mean) >= double(t)) {
            tail += binomial_exact_pmf(nu, q, x);
          }
        }
        REQUIRE(tail <= chernoff_bound(nu, q, double(t)) + 1e-12);
      }
    }
  }
}

TEST_CASE("subcritical order bound") {
  CHECK(subcritical_bound(0.5, 2, 100000) ==
        doctest::Approx(12.0 * std::log(1e5)).epsilon(1e-12));
  CHECK(std::abs(subcritical_bound(0.5, 2, 100000) - 138.2) < 0.06);
  CHECK(std::abs(subcritical_bound(0.25, 3, 10000) - 442.1) < 0.06);
  CHECK_THROWS_AS(subcritical_bound(1.0, 2, 1000), std::domain_error);
}

TEST_CASE("attachment coefficients at the canonical example") {
  const ModelParams m = ModelParams::from_c(10000, 2, 2.0);
  const GiantPrediction p1 = predict(ModelParams::from_c(10000, 2, 1.8));
  CHECK(p1.rho == doctest::Approx(0.2676).epsilon(2e-4));

  const AttachCoefficients ac =
      attach_coefficients(m, 0.1, std::uint64_t(std::llround(p1.mu)));
  CHECK(ac.mu1 == doctest::Approx(7324.0).epsilon(2e-4));
  CHECK(ac.p2 == doctest::Approx(2.000e-5).epsilon(1e-3));
  CHECK(ac.xi0 == doctest::Approx(0.8638).epsilon(5e-4));
  CHECK(ac.xi0 == doctest::Approx(std::exp(-ac.p2 * (ac.mu1 - 1.0))).epsilon(1e-6));
  CHECK(ac.z() == doctest::Approx(0.0).epsilon(1e-2));  // |n1 - mu1| <= 0.5 from rounding

  // k=1, z=0 attachment probability vs the per-vertex isolated form
  const double direct = 1.0 - std::pow(1.0 - ac.p2, double(ac.n1));
  CHECK(ac.attach_probability(1, 0.0) == doctest::Approx(direct).epsilon(1e-3));

  // eps=0 degenerates to no second portion at all
  const AttachCoefficients zero = attach_coefficients(m, 0.0, 7968);
  CHECK(zero.p2 == 0.0);
  CHECK(zero.xi0 == 1.0);
  CHECK(zero.attach_probability(5, 0.0) == 0.0);

  CHECK_THROWS_AS(attach_coefficients(m, 1.0, 7324), std::invalid_argument);
  CHECK_THROWS_AS(attach_coefficients(ModelParams::from_c(10000, 2, 1.05), 0.5, 5000),
                  std::domain_error);
}

TEST_CASE("gamma variance formula") {
  // d=2 collapses the alpha terms and, with r=R=Rbar and c=2, gives 2r
  for (double r : {0.1, 0.25, 0.6}) {
    const GammaVariance gv =
        gamma_variance({r, r, r, 0.7, 2.0, 0.1, 2, 20000});
    CHECK(gv.gamma == doctest::Approx(2.0 * r).epsilon(1e-12));
    CHECK(gv.variance ==
          doctest::Approx(0.7 * 0.7 * gv.gamma * 20000 + 0.7 * r * (1 - r) * 20000)
              .epsilon(1e-12));
  }
  // worked d=3 example
  const GammaVariance ex = gamma_variance({0.3, 0.5, 0.0, 1.0, 2.0, 0.1, 3, 10000});
  CHECK(ex.gamma == doctest::Approx(3.1).epsilon(1e-12));

  CHECK_THROWS_AS(gamma_variance({0.0, 0.5, 0.0, 1.0, 2.0, 0.1, 3, 10000}),
                  std::domain_error);
}

TEST_CASE("gamma variance alpha ratio is continuous at alpha=1") {
  // the (1-a^{d-2})/(1-a^{d-1}) factor tends to (d-2)/(d-1) as a -> 1
  const GammaInputs base{0.3, 0.5, 0.4, 1.0, 2.0, 0.1, 4, 10000};
  GammaInputs nearby = base;
  nearby.alpha = 1.0 - 1e-9;
  CHECK(gamma_variance(base).gamma ==
        doctest::Approx(gamma_variance(nearby).gamma).epsilon(1e-6));
}

TEST_CASE("composed density against the convolution quadrature oracle") {
  std::mt19937_64 gen(123);
  std::uniform_real_distribution<> scale(0.5, 3.0), lam(-0.5, 1.5), zs(-2.5, 2.5);
  for (int t = 0; t < 100; ++t) {
    const double s1 = scale(gen), s3 = scale(gen), sS = scale(gen);
    const double lS = lam(gen), z = zs(gen);
    const ComposedDensity cd = compose_distributions(s1, s3, sS, lS, z);
    const double V = sS * sS + (1 + lS) * (1 + lS) * s1 * s1;
    CHECK(cd.total_variance == doctest::Approx(V).epsilon(1e-12));
    // convolution of the attachment spread (scale sS) against the first-round
    // fluctuation (scale (1+lS)s1), evaluated at z*s3
    const double y = z * s3;
    const double oracle = simpson(
        [&](double t0) {
          const double u = y - (1 + lS) * s1 * t0;
          return phi(t0) * std::exp(-u * u / (2 * sS * sS)) /
                 (sS * std::sqrt(2 * 3.14159265358979323846));
        },
        -12.0, 12.0);
    CHECK(cd.density == doctest::Approx(oracle).epsilon(1e-8));
  }
  // sigma3^2 = V makes it the standard normal density over sigma3
  const ComposedDensity unit = compose_distributions(1.0, std::sqrt(5.0), 2.0, 0.0, 1.3);
  CHECK(unit.density == doctest::Approx(phi(1.3) / std::sqrt(5.0)).epsilon(1e-12));
  CHECK_THROWS_AS(compose_distributions(0.0, 1.0, 1.0, 0.0, 0.0), std::domain_error);
}
