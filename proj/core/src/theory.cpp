#include "hgsim/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "hgsim/numerics.hpp"

namespace hgsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_model(std::uint64_t n, int d) {
  if (d < 2) throw std::invalid_argument("ModelParams: d must be >= 2");
  if (n < static_cast<std::uint64_t>(d)) throw std::invalid_argument("ModelParams: need n >= d");
}

}  // namespace

ModelParams ModelParams::from_c(std::uint64_t n, int d, double c) {
  check_model(n, d);
  if (c < 0.0) throw std::invalid_argument("ModelParams: c must be >= 0");
  const double degree_sets = binom(n - 1, static_cast<std::uint64_t>(d - 1)).as_double();
  ModelParams out;
  out.n = n;
  out.d = d;
  out.c = c;
  out.p = c / degree_sets;
  if (out.p > 1.0) throw std::invalid_argument("ModelParams: c implies p > 1");
  return out;
}

ModelParams ModelParams::from_p(std::uint64_t n, int d, double p) {
  check_model(n, d);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ModelParams: p must be in [0,1]");
  const double degree_sets = binom(n - 1, static_cast<std::uint64_t>(d - 1)).as_double();
  ModelParams out;
  out.n = n;
  out.d = d;
  out.p = p;
  out.c = degree_sets * p;
  return out;
}

double GiantPrediction::sigma() const { return std::sqrt(sigma2); }

double solve_rho(double c, int d, double tol) {
  if (d < 2) throw std::invalid_argument("solve_rho: d must be >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_rho: tol must be positive");
  if (!(c > 1.0 / (d - 1))) {
    throw std::domain_error("solve_rho: subcritical (c <= 1/(d-1)), only the trivial root 1");
  }
  const auto step = [&](double rho) { return std::exp(c * (std::pow(rho, d - 1) - 1.0)); };

  // Fixed-point iteration. The map contracts toward the stable root with rate
  // c(d-1) rho^{d-2} step(rho) < 1, which approaches 1 only at the critical
  // point, so cap the iterations and fall back to bisection if needed.
  double rho = std::exp(-c);
  for (int it = 0; it < 200000; ++it) {
    const double next = step(rho);
    rho = next;
    if (std::abs(rho - step(rho)) <= tol) return rho;
  }

  // Bisection on f(rho) = rho - step(rho): f < 0 at the left edge (the root
  // is the first upward crossing) and f > 0 just below 1 in the
  // supercritical regime.
  double lo = 1e-16;
  double hi = 1.0 - 1e-12;
  if (!(lo - step(lo) < 0.0 && hi - step(hi) > 0.0)) {
    throw std::runtime_error("solve_rho: failed to bracket the root");
  }
  for (int it = 0; it < 20000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(mid - step(mid)) <= tol) return mid;
    if (mid - step(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw std::runtime_error("solve_rho: did not reach the requested tolerance");
}

GiantPrediction predict(const ModelParams& params) {
  const double rho = solve_rho(params.c, params.d, 1e-12);
  const double n = static_cast<double>(params.n);
  const int d = params.d;
  const double rho_pow = std::pow(rho, d - 1);
  const double denom = 1.0 - params.c * (d - 1) * rho_pow;
  GiantPrediction out;
  out.rho = rho;
  out.mu = (1.0 - rho) * n;
  out.sigma2 =
      rho * (1.0 - rho + params.c * (d - 1) * (rho - rho_pow)) * n / (denom * denom);
  return out;
}

double local_probability(double nu, double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("local_probability: sigma must be positive");
  const double t = (nu - mu) / sigma;
  return std::exp(-0.5 * t * t) / (std::sqrt(2.0 * kPi) * sigma);
}

double interval_probability(double a, double b) {
  if (!(a <= b)) throw std::invalid_argument("interval_probability: need a <= b");
  return normal_cdf(b) - normal_cdf(a);
}

double binomial_local_approx(double n, double p, double x) {
  const double v = n * p * (1.0 - p);
  if (!(v > 0.0)) throw std::domain_error("binomial_local_approx: need n p (1-p) > 0");
  const double t = x - n * p;
  return std::exp(-t * t / (2.0 * v)) / std::sqrt(2.0 * kPi * v);
}

double binomial_exact_pmf(double n, double p, double x) {
  return std::exp(log_binomial_pmf(n, p, x));
}

double chernoff_bound(double nu, double q, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("chernoff_bound: t must be positive");
  return 2.0 * std::exp(-t * t / (2.0 * (nu * q + t / 3.0)));
}

double subcritical_bound(double c0, double d, double n) {
  if (!(c0 < 1.0 / (d - 1.0))) {
    throw std::domain_error("subcritical_bound: needs c0 < 1/(d-1)");
  }
  const double gap = 1.0 - (d - 1.0) * c0;
  return 3.0 * (d - 1.0) * (d - 1.0) / (gap * gap) * std::log(n);
}

double AttachCoefficients::zeta(double z) const {
  const double n1_of_z = mu1 + z * sigma1;
  return choose_real(static_cast<double>(n) - n1_of_z, static_cast<std::uint64_t>(d - 1)) * p;
}

double AttachCoefficients::attach_probability(std::uint64_t k, double z) const {
  return 1.0 - std::pow(xi(z), static_cast<double>(k));
}

AttachCoefficients attach_coefficients(const ModelParams& params, double eps, double n1) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("attach_coefficients: eps must be in [0,1)");
  }
  const double c1 = (1.0 - eps) * params.c;
  if (!(c1 > 1.0 / (params.d - 1))) {
    throw std::domain_error("attach_coefficients: round-1 parameters are subcritical");
  }
  const double p1 = (1.0 - eps) * params.p;
  const double p2 = (params.p - p1) / (1.0 - p1);

  ModelParams round1 = params;
  round1.c = c1;
  round1.p = p1;
  const GiantPrediction pred1 = predict(round1);

  AttachCoefficients out;
  out.n = params.n;
  out.d = params.d;
  out.p = params.p;
  out.p2 = p2;
  out.eps = eps;
  out.mu1 = pred1.mu;
  out.sigma1 = pred1.sigma();
  out.n1 = n1;

  const double nd = static_cast<double>(params.n);
  const auto k1 = static_cast<std::uint64_t>(params.d - 1);
  const double reach_all = choose_real(nd - 1.0, k1);
  const double reach_out = choose_real(nd - pred1.mu, k1);
  out.xi0 = std::exp(-p2 * (reach_all - reach_out));
  out.xi_slope =
      out.sigma1 * p2 * choose_real(nd - pred1.mu, static_cast<std::uint64_t>(params.d - 2));
  return out;
}

GammaVariance gamma_variance(const GammaInputs& in) {
  if (!(in.r > 0.0)) throw std::domain_error("gamma_variance: r must be positive");
  if (in.d < 2) throw std::invalid_argument("gamma_variance: d must be >= 2");
  if (!(in.alpha >= 0.0 && in.alpha <= 1.0)) {
    throw std::invalid_argument("gamma_variance: alpha must be in [0,1]");
  }
  const double a = in.alpha;
  // (1 - a^{d-2}) / (1 - a^{d-1}) via geometric sums, exact at a = 1.
  double num = 0.0;
  double den = 0.0;
  double pow_a = 1.0;
  for (int i = 0; i <= in.d - 2; ++i) {
    if (i <= in.d - 3) num += pow_a;
    den += pow_a;
    pow_a *= a;
  }
  const double tail_ratio = num / den;
  const double one_minus_ad2 = (1.0 - a) * num;  // 1 - a^{d-2}

  GammaVariance out;
  out.gamma = (1.0 - in.R) * (in.R - in.r) + ((in.d - 1) * in.c - 1.0) * in.R * in.R / in.r +
              in.R + (in.d - 1) * one_minus_ad2 * in.eps * in.c * in.Rbar * in.Rbar +
              tail_ratio * in.Rbar;
  out.variance = a * a * out.gamma * in.n + a * in.r * (1.0 - in.r) * in.n;
  return out;
}

ComposedDensity compose_distributions(double sigma1, double sigma3, double sigmaS,
                                      double lambdaS, double z) {
  if (!(sigma1 > 0.0 && sigma3 > 0.0 && sigmaS > 0.0)) {
    throw std::domain_error("compose_distributions: scales must be positive");
  }
  ComposedDensity out;
  out.total_variance = sigmaS * sigmaS + (1.0 + lambdaS) * (1.0 + lambdaS) * sigma1 * sigma1;
  out.density = std::exp(-z * z * sigma3 * sigma3 / (2.0 * out.total_variance)) /
                std::sqrt(2.0 * kPi * out.total_variance);
  return out;
}

}  // namespace hgsim
