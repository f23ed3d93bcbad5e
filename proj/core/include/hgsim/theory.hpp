#pragma once

#include <cstdint>

namespace hgsim {

// Model parameters for a random d-uniform hypergraph in which every d-set of
// {1..n} is an edge independently with probability p. The average-degree
// parameter c = C(n-1, d-1) * p is the natural dial: the largest component
// jumps from O(log n) to linear order as c crosses 1/(d-1).
struct ModelParams {
  std::uint64_t n = 0;
  int d = 2;
  double c = 0.0;
  double p = 0.0;

  static ModelParams from_c(std::uint64_t n, int d, double c);
  static ModelParams from_p(std::uint64_t n, int d, double p);

  double critical_c() const { return 1.0 / (d - 1); }
  bool supercritical() const { return c > critical_c(); }
};

// Closed-form prediction for the largest component in the supercritical
// regime: rho solves rho = exp(c(rho^{d-1}-1)) in (0,1), the giant has mean
// order (1-rho)n, and its order is asymptotically normal with the variance
// below.
struct GiantPrediction {
  double rho = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;

  double sigma() const;
};

// Unique root of rho = exp(c(rho^{d-1}-1)) in (0,1). Fixed-point iteration
// from rho_0 = e^{-c} (the map is a contraction toward the stable root), with
// a bisection fallback on rho - exp(c(rho^{d-1}-1)) over (1e-16, 1-1e-12)
// guaranteeing termination. Throws std::domain_error when c <= 1/(d-1),
// where only the trivial root 1 exists.
double solve_rho(double c, int d, double tol = 1e-12);

// rho, mu = (1-rho)n and
// sigma2 = rho[1-rho + c(d-1)(rho - rho^{d-1})] n / (1 - c(d-1)rho^{d-1})^2.
// For d=2 this collapses to rho(1-rho)n/(1-c rho)^2.
GiantPrediction predict(const ModelParams& params);

// Gaussian local law: probability that an integer-valued quantity with mean
// mu and scale sigma hits nu exactly, (2 pi sigma^2)^{-1/2} e^{-(nu-mu)^2/(2 sigma^2)}.
double local_probability(double nu, double mu, double sigma);

// Phi(b) - Phi(a), the standard normal interval probability. Accepts
// infinite endpoints. Absolute error below 1e-10 (see numerics.hpp).
double interval_probability(double a, double b);

// Local limit approximation of the Binomial(n, p) mass at x:
// (2 pi n p(1-p))^{-1/2} exp(-(x-np)^2 / (2np(1-p))).
double binomial_local_approx(double n, double p, double x);

// Exact Binomial(n, p) mass at integer x via log-gamma; 0 outside [0, n].
double binomial_exact_pmf(double n, double p, double x);

// Two-sided Bernstein/Chernoff tail bound for Binomial(nu, q):
// P[|X - nu q| >= t] <= 2 exp(-t^2 / (2(nu q + t/3))).
double chernoff_bound(double nu, double q, double t);

// Largest-component order bound in the subcritical regime c0 < 1/(d-1):
// with probability 1 - O(n^{-1}) every component has order at most
// 3(d-1)^2 (1-(d-1)c0)^{-2} ln n.
double subcritical_bound(double c0, double d, double n);

// Coefficients of the attachment law for the staged exposure: after a first
// round at probability p1 = (1-eps)p grows a giant of predicted order
// mu1 +- sigma1, a component of order k outside it attaches through the
// crossing round with probability 1 - xi(z)^k, where z standardizes the
// realized giant order n1 and
//   xi0  = exp(-p2 [C(n-1, d-1) - C(n-mu1, d-1)]),
//   xi(z) = xi0 (1 + z sigma1 p2 C(n-mu1, d-2)),
//   zeta(z) = C(n - n1(z), d-1) p,   n1(z) = mu1 + z sigma1.
struct AttachCoefficients {
  std::uint64_t n = 0;
  int d = 2;
  double p = 0.0;
  double p2 = 0.0;      // second-stage probability, (p - p1)/(1 - p1)
  double eps = 0.0;
  double mu1 = 0.0;     // predicted round-1 giant order
  double sigma1 = 0.0;  // predicted round-1 giant scale
  double n1 = 0.0;      // realized round-1 giant order this instance
  double xi0 = 0.0;
  double xi_slope = 0.0;  // sigma1 * p2 * C(n-mu1, d-2)

  double z() const { return (n1 - mu1) / sigma1; }
  double xi(double z) const { return xi0 * (1.0 + z * xi_slope); }
  double zeta(double z) const;
  // Predicted probability that a fixed outside component of order k attaches.
  double attach_probability(std::uint64_t k, double z) const;
};

AttachCoefficients attach_coefficients(const ModelParams& params, double eps, double n1);

// Inputs for the variance formula of the crossing-attachment count S_G:
// reach statistics r (probability a vertex outside G attaches), R and Rbar
// (mean attached / unattached component-order contributions), and
// alpha = 1 - |G|/n.
struct GammaInputs {
  double r = 0.0;
  double R = 0.0;
  double Rbar = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double eps = 0.0;
  int d = 2;
  double n = 0.0;
};

struct GammaVariance {
  double gamma = 0.0;
  double variance = 0.0;  // alpha^2 Gamma n + alpha r (1-r) n
};

// Gamma = (1-R)(R-r) + ((d-1)c - 1) R^2/r + R
//       + (d-1)(1 - alpha^{d-2}) eps c Rbar^2
//       + (1 - alpha^{d-2})/(1 - alpha^{d-1}) Rbar.
// The last ratio is evaluated through the geometric-sum form
// (1 + alpha + ... + alpha^{d-3}) / (1 + alpha + ... + alpha^{d-2}), which is
// exact at alpha = 1 (limit (d-2)/(d-1)) and stable next to it.
GammaVariance gamma_variance(const GammaInputs& inputs);

// Density at z of the convolution of the attachment fluctuation (scale
// sigmaS, linear response lambdaS to the round-1 fluctuation of scale sigma1)
// with that round-1 fluctuation, renormalized by sigma3:
//   density(z) = (2 pi)^{-1/2} V^{-1/2} exp(-z^2 sigma3^2 / (2V)),
//   V = sigmaS^2 + (1+lambdaS)^2 sigma1^2.
struct ComposedDensity {
  double density = 0.0;
  double total_variance = 0.0;
};

ComposedDensity compose_distributions(double sigma1, double sigma3, double sigmaS,
                                      double lambdaS, double z);

}  // namespace hgsim
