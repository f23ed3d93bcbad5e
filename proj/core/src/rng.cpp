#include "hgsim/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "hgsim/numerics.hpp"

namespace hgsim {

std::uint64_t Rng::binomial(double trials, double p) {
  if (!(trials >= 0) || !(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("Rng::binomial: need trials >= 0, p in [0,1]");
  }
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) {
    // Only meaningful when the count is materializable as an integer.
    if (trials > 9.2e18) {
      throw std::domain_error("Rng::binomial: p=1 with non-representable trial count");
    }
    return static_cast<std::uint64_t>(trials);
  }
  // Work with q = min(p, 1-p) and mirror back; the mirrored count n - k only
  // arises when n is moderate (a huge n with p > 1/2 would mean a huge mean,
  // which is rejected as non-materializable anyway).
  const bool mirrored = p > 0.5;
  const double q = mirrored ? 1.0 - p : p;
  const double mean = trials * q;
  if (mean > 1e12) {
    throw std::domain_error("Rng::binomial: mean too large to materialize");
  }
  const std::uint64_t k = mean < 10.0 ? binomial_small_mean(trials, q)
                                      : binomial_btrs(trials, q);
  return mirrored ? static_cast<std::uint64_t>(trials) - k : k;
}

std::uint64_t Rng::binomial_small_mean(double trials, double p) {
  // Inversion by sequential search on the pmf recurrence
  // f(k+1) = f(k) * (n-k)/(k+1) * p/(1-p); safe here because n*log1p(-p)
  // is bounded below by roughly -mean, so f(0) cannot underflow.
  const double ratio = p / (1.0 - p);
  double f = std::exp(trials * std::log1p(-p));
  double cdf = f;
  const double u = next_unit();
  std::uint64_t k = 0;
  // The tail beyond mean + ~50 sd is below 1e-300; the bound is just a guard.
  const std::uint64_t hard_cap = 1u << 20;
  while (u > cdf && k < hard_cap) {
    f *= (trials - static_cast<double>(k)) * ratio / static_cast<double>(k + 1);
    cdf += f;
    ++k;
  }
  return k;
}

std::uint64_t Rng::binomial_btrs(double trials, double p) {
  // Hoermann (1993), algorithm BTRS: transformed rejection with a squeeze.
  // Valid for p <= 1/2 and mean >= 10. The exact acceptance test compares
  // against log(f(k)/f(m)) with m the mode, evaluated through log_choose so
  // that trial counts beyond 2^63 lose no precision.
  const double n = trials;
  const double q = 1.0 - p;
  const double spq = std::sqrt(n * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double m = std::floor((n + 1) * p);  // mode
  const double log_f_mode = log_choose(n, m) + m * lpq;

  for (;;) {
    const double u = next_unit() - 0.5;
    double v = next_unit();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + c);
    if (kd < 0 || kd > n) continue;
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::uint64_t>(kd);
    }
    v = v * alpha / (a / (us * us) + b);
    const double log_f_k = log_choose(n, kd) + kd * lpq;
    if (std::log(v) <= log_f_k - log_f_mode) {
      return static_cast<std::uint64_t>(kd);
    }
  }
}

}  // namespace hgsim
