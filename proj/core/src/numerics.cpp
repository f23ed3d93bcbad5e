#include "hgsim/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace hgsim {

namespace {

constexpr unsigned __int128 kU128Max = ~static_cast<unsigned __int128>(0);

double u128_to_double(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return static_cast<double>(hi) * 0x1.0p64 + static_cast<double>(lo);
}

// lgamma(n+1) - lgamma(n-k+1) without cancellation, for n >= 1e6 and k << n.
// From Stirling: lgamma(x+1) = (x+1/2) ln x - x + ln(2 pi)/2 + 1/(12x) + O(x^-3);
// the difference collapses to the form below, whose terms are all O(k log n).
double log_falling_factorial_large(double n, double k) {
  return k * std::log(n) - k - (n - k + 0.5) * std::log1p(-k / n)
         + 1.0 / (12.0 * n) - 1.0 / (12.0 * (n - k));
}

}  // namespace

BinomValue binom(std::uint64_t n, std::uint64_t k) {
  BinomValue out;
  if (k > n) {
    out.exact = true;
    out.value = 0;
    out.approx = 0.0;
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  if (k > n - k) k = n - k;

  // Multiplicative form: value stays the exact C(n-k+i choose i) after step i,
  // so every intermediate division is exact. Bail to floating point on overflow.
  unsigned __int128 value = 1;
  bool overflow = false;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const unsigned __int128 factor = n - k + i;
    if (value > kU128Max / factor) {
      overflow = true;
      break;
    }
    value = value * factor / i;
  }

  out.log_value = log_choose(static_cast<double>(n), static_cast<double>(k));
  if (!overflow) {
    out.exact = true;
    out.value = value;
    out.approx = u128_to_double(value);
  } else {
    out.exact = false;
    out.approx = std::exp(out.log_value);
  }
  return out;
}

double log_choose(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k > n - k) k = n - k;
  if (k == 0) return 0.0;
  if (n <= 1e6) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
  }
  return log_falling_factorial_large(n, k) - std::lgamma(k + 1);
}

double choose_real(double n, std::uint64_t k) {
  if (n < 0) return 0.0;
  if (n < static_cast<double>(k) - 1e-12) return 0.0;
  double v = 1.0;
  for (std::uint64_t i = 0; i < k; ++i) {
    v *= (n - static_cast<double>(i)) / static_cast<double>(k - i);
  }
  return v;
}

double log_binomial_pmf(double n, double p, double x) {
  if (x < 0 || x > n || x != std::floor(x)) {
    return -std::numeric_limits<double>::infinity();
  }
  if (p <= 0.0) return x == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return x == n ? 0.0 : -std::numeric_limits<double>::infinity();
  return log_choose(n, x) + x * std::log(p) + (n - x) * std::log1p(-p);
}

namespace {

// Cody (1969) coefficient set as distributed in SPECFUN's CALERF.
constexpr double kErfA[5] = {3.16112374387056560e00, 1.13864154151050156e02,
                             3.77485237685302021e02, 3.20937758913846947e03,
                             1.85777706184603153e-1};
constexpr double kErfB[4] = {2.36012909523441209e01, 2.44024637934444173e02,
                             1.28261652607737228e03, 2.84423683343917062e03};
constexpr double kErfC[9] = {5.64188496988670089e-1, 8.88314979438837594e00,
                             6.61191906371416295e01, 2.98635138197400131e02,
                             8.81952221241769090e02, 1.71204761263407058e03,
                             2.05107837782607147e03, 1.23033935479799725e03,
                             2.15311535474403846e-8};
constexpr double kErfD[8] = {1.57449261107098347e01, 1.17693950891312499e02,
                             5.37181101862009858e02, 1.62138957456669019e03,
                             3.29079923573345963e03, 4.36261909014324716e03,
                             3.43936767414372164e03, 1.23033935480374942e03};
constexpr double kErfP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                             1.25781726111229246e-1, 1.60837851487422766e-2,
                             6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr double kErfQ[5] = {2.56852019228982242e00, 1.87295284992346047e00,
                             5.27905102951428412e-1, 6.05183413124413191e-2,
                             2.33520497626869185e-3};
constexpr double kInvSqrtPi = 5.6418958354775628695e-1;

// erfc(y)*exp(y^2) for y >= 0.46875, plus the split-exponential trick from
// CALERF that keeps exp(-y^2) accurate: y^2 is evaluated as ysq^2 + (y-ysq)(y+ysq)
// with ysq a 1/16-grid truncation, so the large exponent is applied to an
// exactly representable argument.
double erfc_scaled_upper(double y) {
  double result;
  if (y <= 4.0) {
    double xnum = kErfC[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + kErfC[i]) * y;
      xden = (xden + kErfD[i]) * y;
    }
    result = (xnum + kErfC[7]) / (xden + kErfD[7]);
  } else {
    const double ysq = 1.0 / (y * y);
    double xnum = kErfP[5] * ysq;
    double xden = ysq;
    for (int i = 0; i < 4; ++i) {
      xnum = (xnum + kErfP[i]) * ysq;
      xden = (xden + kErfQ[i]) * ysq;
    }
    result = ysq * (xnum + kErfP[4]) / (xden + kErfQ[4]);
    result = (kInvSqrtPi - result) / y;
  }
  return result;
}

double exp_neg_square(double y) {
  const double ysq = std::floor(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

}  // namespace

double erf_cody(double x) {
  const double y = std::fabs(x);
  if (y <= 0.46875) {
    const double z = y * y;
    double xnum = kErfA[4] * z;
    double xden = z;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + kErfA[i]) * z;
      xden = (xden + kErfB[i]) * z;
    }
    return x * (xnum + kErfA[3]) / (xden + kErfB[3]);
  }
  const double result = 1.0 - erfc_scaled_upper(y) * exp_neg_square(y);
  return x < 0 ? -result : result;
}

double erfc_cody(double x) {
  const double y = std::fabs(x);
  if (y <= 0.46875) {
    return 1.0 - erf_cody(x);
  }
  double result = erfc_scaled_upper(y) * exp_neg_square(y);
  if (x < 0) result = 2.0 - result;
  return result;
}

double normal_cdf(double x) { return 0.5 * erfc_cody(-x * M_SQRT1_2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("normal_quantile: u must lie in (0,1)");
  }
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Lower incomplete gamma by its power series (converges fast for x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by continued fraction, modified Lentz evaluation.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0 || x < 0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
  if (x == 0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0 || x < 0) throw std::domain_error("gamma_q: need a > 0, x >= 0");
  if (x == 0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

}  // namespace hgsim
