#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgsim/theory.hpp"

namespace hgsim {

// A batch of observed integer statistics (largest-component orders,
// attachment counts, ...) together with everything needed to regenerate it
// bit-exactly: the model parameters, the master seed, and the trial count
// (trial i always uses mix_seed(seed, i)).
struct SampleSet {
  std::vector<double> values;
  ModelParams params;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string label;
};

// Mean and unbiased (n-1) variance. Throws on an empty sample.
std::pair<double, double> moments(std::span<const double> values);

// Kolmogorov-Smirnov sup-distance between the empirical CDF of
// (x - mu)/sigma and the standard normal CDF. Classical asymptotic critical
// values: 1.36/sqrt(m) at 5%, 1.63/sqrt(m) at 1%.
double ks_normal(std::span<const double> samples, double mu, double sigma);

// Per-integer comparison of empirical frequencies against the Gaussian local
// law over the window |nu - mu| <= halfwidth * sigma.
struct LocalLawRow {
  std::int64_t nu = 0;
  double empirical = 0.0;
  double predicted = 0.0;
};

struct LocalLawReport {
  std::vector<LocalLawRow> rows;
  double l1 = 0.0;  // sum of |empirical - predicted| over the window
};

LocalLawReport local_law_report(std::span<const double> samples, double mu, double sigma,
                                double halfwidth_in_sigmas);

// Pearson chi-square with adjacent bins pooled until each expected count is
// at least 5 (a trailing remainder merges into the last pooled bin); p-value
// from the regularized upper incomplete gamma, Q(dof/2, statistic/2).
struct ChiSquareResult {
  double statistic = 0.0;
  std::uint64_t dof = 0;
  double p_value = 1.0;
  std::uint64_t pooled_bins = 0;
};

ChiSquareResult chi_square(std::span<const double> observed,
                           std::span<const double> expected);

// Observed attachment counts for one batch of surrogate traces sharing a
// designated-set size n1.
struct ResponseGroup {
  double n1 = 0.0;
  std::vector<double> sg;
};

// Weighted least squares of the group means of SG on (n1 - mu1), with
// inverse-variance weights m_g / s_g^2. The quadratic column measures
// residual nonlinearity: quad_z is the z-score of its coefficient (its
// square is the F-statistic for adding the term).
struct LinearResponse {
  double mu_s_hat = 0.0;      // fitted mean attachment at n1 = mu1
  double lambda_s_hat = 0.0;  // fitted slope in n1
  double mu_s_se = 0.0;
  double lambda_s_se = 0.0;
  double quad_coeff = 0.0;
  double quad_se = 0.0;
  double quad_z = 0.0;
  std::uint64_t samples = 0;
};

LinearResponse linear_response(const std::vector<ResponseGroup>& groups, double mu1);

// Empirical distribution of the component order of a fixed vertex in the
// subcritical regime: q_hat[k] estimates the probability that vertex 1 lies
// in a component of order k. decay_slope is the OLS slope of log q_hat[k]
// over k in [fit_lo, fit_hi] (NaN when fewer than two positive bins exist);
// geometric decay means a strictly negative slope.
struct QkEstimate {
  std::vector<double> q;  // index 0 unused; 1..k_max
  double decay_slope = 0.0;
  int fit_lo = 0;
  int fit_hi = 0;
  std::uint64_t oversize = 0;  // trials whose component exceeded k_max
  std::uint64_t trials = 0;
};

QkEstimate q_k_empirical(double c, int d, std::uint64_t n, std::uint64_t trials,
                         std::uint64_t k_max, std::uint64_t seed);

// One test outcome with everything needed to reproduce it.
struct TestReport {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string params;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
};

// Exhaustive audit of the component-indicator identities behind the normal
// approximation, on graphs small enough to enumerate every vertex subset:
// with I_a = [a is a component] and Y_a = |a| I_a (superscript: after
// deleting every edge meeting a),
//   - intersecting distinct a, b:  Y_a Y_b = 0,
//   - disjoint a, b:               Y_a (Y_b - Y_b^a) Y_b^a = 0,
//   - a,b and a,c disjoint, b,c intersecting and distinct:
//                                  (Y_b - Y_b^a) Y_c^a = (Y_b - Y_b^a) Y_c = 0.
// All three are evaluated pathwise in integer arithmetic (zero tolerance) on
// the first min(trials, 100) graphs. On top of that, every subset a of size
// <= 3 gets a Monte Carlo check of the product form
//   P[I_a = 1] = P[a internally connected] * (1-p)^{#edges crossing a}
// over all trials, reported as a z-score (the binomial probabilities are
// exact by subset enumeration, so 4 SE is a sound flag threshold).
struct SteinAlphaStat {
  std::uint32_t mask = 0;  // vertex-set bitmask, bit i = vertex i+1
  int size = 0;
  double expected = 0.0;
  std::uint64_t observed = 0;
  double z = 0.0;
};

struct SteinAuditResult {
  TestReport report;
  std::uint64_t identity_graphs = 0;
  std::uint64_t identity_checks = 0;
  std::uint64_t identity_violations = 0;
  double max_abs_z = 0.0;
  std::vector<SteinAlphaStat> factorization;
};

SteinAuditResult stein_audit(std::uint64_t n, int d, double p, int k_max,
                             std::uint64_t trials, std::uint64_t seed);

}  // namespace hgsim
