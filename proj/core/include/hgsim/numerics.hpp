#pragma once

#include <cstdint>
#include <limits>

namespace hgsim {

// Binomial coefficient with an explicit exact/floating split: exact 128-bit
// value while it fits, otherwise only the log / double forms are meaningful.
// The switchover is what lets edge-count arithmetic stay exact for every
// feasible workload while still accepting parameters where C(n,d) > 2^127.
struct BinomValue {
  bool exact = false;            // value holds the true integer
  unsigned __int128 value = 0;   // valid iff exact
  double approx = 0.0;           // best double approximation, always set
  double log_value = -std::numeric_limits<double>::infinity();  // natural log

  double as_double() const { return approx; }
};

BinomValue binom(std::uint64_t n, std::uint64_t k);

// log C(n, k) for possibly non-integer n (k a small nonnegative integer count).
// Uses lgamma below 1e6 and a Stirling-series difference above, which avoids
// the catastrophic cancellation of lgamma(n+1) - lgamma(n-k+1) for huge n.
double log_choose(double n, double k);

// C(n, k) as a double for real n (e.g. n - mu1 with fractional mu1), k small.
double choose_real(double n, std::uint64_t k);

// log of the Binomial(n, p) probability mass at integer x; -inf outside [0,n].
double log_binomial_pmf(double n, double p, double x);

// Rational Chebyshev approximation of erf/erfc after W. J. Cody,
// "Rational Chebyshev approximation for the error function",
// Math. Comp. 23 (1969) 631-637 (the SPECFUN/CALERF coefficient set;
// max relative error below 1e-16 in double, far inside the 1e-10 budget).
double erf_cody(double x);
double erfc_cody(double x);

// Standard normal CDF built on erfc_cody.
double normal_cdf(double x);

// Quantile of the standard normal via bisection on normal_cdf; intended for
// test constructions and report annotations, not hot loops.
double normal_quantile(double u);

// Regularized incomplete gamma functions P(a,x) (lower) and Q(a,x) (upper),
// by series expansion for x < a+1 and a modified-Lentz continued fraction
// otherwise (Numerical Recipes 6.2). Q(dof/2, x/2) is the chi-square p-value.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

}  // namespace hgsim
