#include "hgsim/stats.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "hgsim/hypergraph.hpp"
#include "hgsim/numerics.hpp"
#include "hgsim/rng.hpp"
#include "hgsim/sampling.hpp"

namespace hgsim {

std::pair<double, double> moments(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("moments: empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, ss / static_cast<double>(values.size() - 1)};
}

double ks_normal(std::span<const double> samples, double mu, double sigma) {
  if (samples.empty()) throw std::invalid_argument("ks_normal: empty sample");
  if (!(sigma > 0.0)) throw std::domain_error("ks_normal: sigma must be positive");
  std::vector<double> z(samples.begin(), samples.end());
  for (double& x : z) x = (x - mu) / sigma;
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / m - f,
                             f - static_cast<double>(i) / m));
  }
  return d;
}

LocalLawReport local_law_report(std::span<const double> samples, double mu, double sigma,
                                double halfwidth_in_sigmas) {
  if (samples.empty()) throw std::invalid_argument("local_law_report: empty sample");
  if (!(sigma > 0.0)) throw std::domain_error("local_law_report: sigma must be positive");
  if (!(halfwidth_in_sigmas >= 0.0)) {
    throw std::invalid_argument("local_law_report: halfwidth must be >= 0");
  }
  const auto lo = static_cast<std::int64_t>(std::ceil(mu - halfwidth_in_sigmas * sigma));
  const auto hi = static_cast<std::int64_t>(std::floor(mu + halfwidth_in_sigmas * sigma));
  if (lo > hi) throw std::invalid_argument("local_law_report: window holds no integers");

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(hi - lo + 1), 0);
  for (double x : samples) {
    const auto v = static_cast<std::int64_t>(std::llround(x));
    if (v >= lo && v <= hi) ++counts[static_cast<std::size_t>(v - lo)];
  }

  LocalLawReport out;
  out.rows.reserve(counts.size());
  const double m = static_cast<double>(samples.size());
  for (std::int64_t nu = lo; nu <= hi; ++nu) {
    LocalLawRow row;
    row.nu = nu;
    row.empirical = static_cast<double>(counts[static_cast<std::size_t>(nu - lo)]) / m;
    row.predicted = local_probability(static_cast<double>(nu), mu, sigma);
    out.l1 += std::abs(row.empirical - row.predicted);
    out.rows.push_back(row);
  }
  return out;
}

ChiSquareResult chi_square(std::span<const double> observed,
                           std::span<const double> expected) {
  if (observed.size() != expected.size()) {
    throw std::invalid_argument("chi_square: observed/expected size mismatch");
  }
  if (observed.empty()) throw std::invalid_argument("chi_square: empty input");

  std::vector<double> po, pe;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] >= 0.0)) {
      throw std::invalid_argument("chi_square: negative expected count");
    }
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= 5.0) {
      po.push_back(o_acc);
      pe.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (po.empty()) {
      throw std::invalid_argument("chi_square: expected counts too small for even one bin");
    }
    po.back() += o_acc;
    pe.back() += e_acc;
  }
  if (po.size() < 2) {
    throw std::invalid_argument("chi_square: fewer than two pooled bins");
  }

  ChiSquareResult out;
  out.pooled_bins = po.size();
  for (std::size_t i = 0; i < po.size(); ++i) {
    const double diff = po[i] - pe[i];
    out.statistic += diff * diff / pe[i];
  }
  out.dof = po.size() - 1;
  out.p_value = gamma_q(static_cast<double>(out.dof) / 2.0, out.statistic / 2.0);
  return out;
}

namespace {

// Inverse of a symmetric positive-definite 3x3 matrix via the adjugate.
std::array<std::array<double, 3>, 3> invert3(const std::array<std::array<double, 3>, 3>& a) {
  std::array<std::array<double, 3>, 3> inv;
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(std::abs(det) > 0.0)) {
    throw std::runtime_error("linear_response: singular design matrix");
  }
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = inv[0][1];
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = inv[0][2];
  inv[2][1] = inv[1][2];
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return inv;
}

}  // namespace

LinearResponse linear_response(const std::vector<ResponseGroup>& groups, double mu1) {
  std::set<double> distinct;
  for (const auto& g : groups) distinct.insert(g.n1);
  if (distinct.size() < 3) {
    throw std::invalid_argument("linear_response: need >= 3 distinct n1 values, have " +
                                std::to_string(distinct.size()));
  }

  std::vector<double> x, y, w;
  std::uint64_t total = 0;
  for (const auto& g : groups) {
    if (g.sg.size() < 2) {
      throw std::invalid_argument("linear_response: every group needs >= 2 observations");
    }
    const auto [mean, var] = moments(g.sg);
    x.push_back(g.n1 - mu1);
    y.push_back(mean);
    // Inverse variance of the group mean; a floor keeps degenerate
    // (all-equal) groups finite without distorting the relative weighting.
    w.push_back(static_cast<double>(g.sg.size()) / std::max(var, 1e-12));
    total += g.sg.size();
  }

  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    s0 += w[i];
    s1 += w[i] * xi;
    s2 += w[i] * xi * xi;
    s3 += w[i] * xi * xi * xi;
    s4 += w[i] * xi * xi * xi * xi;
    t0 += w[i] * y[i];
    t1 += w[i] * xi * y[i];
    t2 += w[i] * xi * xi * y[i];
  }

  LinearResponse out;
  out.samples = total;

  const double delta = s0 * s2 - s1 * s1;
  if (!(delta > 0.0)) throw std::runtime_error("linear_response: singular design matrix");
  out.mu_s_hat = (s2 * t0 - s1 * t1) / delta;
  out.lambda_s_hat = (s0 * t1 - s1 * t0) / delta;
  out.mu_s_se = std::sqrt(s2 / delta);
  out.lambda_s_se = std::sqrt(s0 / delta);

  const auto inv = invert3({{{s0, s1, s2}, {s1, s2, s3}, {s2, s3, s4}}});
  out.quad_coeff = inv[2][0] * t0 + inv[2][1] * t1 + inv[2][2] * t2;
  out.quad_se = std::sqrt(inv[2][2]);
  out.quad_z = out.quad_coeff / out.quad_se;
  return out;
}

QkEstimate q_k_empirical(double c, int d, std::uint64_t n, std::uint64_t trials,
                         std::uint64_t k_max, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("q_k_empirical: d must be >= 2");
  if (n < static_cast<std::uint64_t>(d)) throw std::invalid_argument("q_k_empirical: need n >= d");
  if (trials == 0 || k_max == 0) {
    throw std::invalid_argument("q_k_empirical: trials and k_max must be positive");
  }
  if (!(c < 1.0 / (d - 1) - 1e-3)) {
    throw std::domain_error("q_k_empirical: needs subcritical c < 1/(d-1) - 1e-3");
  }
  const ModelParams params = ModelParams::from_c(n, d, c);
  const EdgeFamily family = EdgeFamily::all(n, d);

  // Union-find with generation stamps: vertices initialize lazily on first
  // touch, so a trial costs O(edges) rather than O(n).
  std::vector<std::uint32_t> parent(n + 1), size(n + 1);
  std::vector<std::uint64_t> stamp(n + 1, 0);
  std::uint64_t gen = 0;
  const auto find = [&](std::uint32_t v) {
    if (stamp[v] != gen) {
      stamp[v] = gen;
      parent[v] = v;
      size[v] = 1;
    }
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  const auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  };

  std::vector<std::uint64_t> counts(k_max + 1, 0);
  QkEstimate out;
  out.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, t));
    const std::vector<Vertex> flat = sample_family(family, params.p, rng);
    ++gen;
    for (std::size_t i = 0; i < flat.size(); i += static_cast<std::size_t>(d)) {
      for (int j = 1; j < d; ++j) unite(flat[i], flat[i + static_cast<std::size_t>(j)]);
    }
    const std::uint64_t k = size[find(1)];
    if (k <= k_max) {
      ++counts[k];
    } else {
      ++out.oversize;
    }
  }

  out.q.assign(k_max + 1, 0.0);
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    out.q[k] = static_cast<double>(counts[k]) / static_cast<double>(trials);
  }

  // Geometric-decay fit: OLS of log q_k on k over the mid range, where the
  // estimates are stable but the tail truncation does not bite yet.
  out.fit_lo = 5;
  out.fit_hi = static_cast<int>(std::min<std::uint64_t>(15, k_max));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int pts = 0;
  for (int k = out.fit_lo; k <= out.fit_hi; ++k) {
    if (out.q[static_cast<std::size_t>(k)] <= 0.0) continue;
    const double lx = k;
    const double ly = std::log(out.q[static_cast<std::size_t>(k)]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++pts;
  }
  if (pts >= 2) {
    out.decay_slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
  } else {
    out.decay_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

namespace {

// Union-find sized for the exhaustive audit (n <= 14 vertices, 0-based).
struct MiniUF {
  std::array<std::uint8_t, 16> parent{};
  std::array<std::uint8_t, 16> size{};

  void reset(int n) {
    for (int i = 0; i < n; ++i) {
      parent[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
      size[static_cast<std::size_t>(i)] = 1;
    }
  }
  int find(int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[parent[static_cast<std::size_t>(v)]];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(a);
    size[static_cast<std::size_t>(a)] =
        static_cast<std::uint8_t>(size[static_cast<std::size_t>(a)] + size[static_cast<std::size_t>(b)]);
  }
};

// All d-subset bitmasks of {0..n-1}, lexicographic.
std::vector<std::uint32_t> subset_masks(int n, int d) {
  std::vector<std::uint32_t> out;
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::uint32_t mask = 0;
    for (int i : idx) mask |= 1u << i;
    out.push_back(mask);
    int i = d - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - (d - i)) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

// Exact probability that the vertex set `mask` is internally connected when
// each of its d-subsets is an edge independently with probability p, by
// enumerating all 2^(#candidates) edge patterns (#candidates <= 6 for the
// subset sizes the audit checks).
double connected_probability(std::uint32_t mask, int d, double p) {
  const int size = std::popcount(mask);
  if (size == 1) return 1.0;
  if (size < d) return 0.0;
  std::vector<int> vs;
  for (int v = 0; v < 16; ++v) {
    if (mask & (1u << v)) vs.push_back(v);
  }
  const std::vector<std::uint32_t> local = subset_masks(size, d);  // masks over vs indices
  double total = 0.0;
  for (std::uint32_t pattern = 0; pattern < (1u << local.size()); ++pattern) {
    MiniUF uf;
    uf.reset(size);
    for (std::size_t e = 0; e < local.size(); ++e) {
      if (!(pattern & (1u << e))) continue;
      const std::uint32_t em = local[e];
      const int base = std::countr_zero(em);
      for (int v = base + 1; v < size; ++v) {
        if (em & (1u << v)) uf.unite(base, v);
      }
    }
    if (uf.size[static_cast<std::size_t>(uf.find(0))] != size) continue;
    const int chosen = std::popcount(pattern);
    total += std::pow(p, chosen) *
             std::pow(1.0 - p, static_cast<double>(local.size()) - chosen);
  }
  return total;
}

}  // namespace

SteinAuditResult stein_audit(std::uint64_t n, int d, double p, int k_max,
                             std::uint64_t trials, std::uint64_t seed) {
  if (n > 14) {
    throw std::invalid_argument("stein_audit: n must be <= 14 (exhaustive subset enumeration)");
  }
  if (d < 2 || n < static_cast<std::uint64_t>(d)) {
    throw std::invalid_argument("stein_audit: need 2 <= d <= n");
  }
  if (k_max < 1 || k_max > 4) throw std::invalid_argument("stein_audit: k_max must be in 1..4");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("stein_audit: p must be in [0,1]");
  if (trials == 0) throw std::invalid_argument("stein_audit: trials must be positive");

  const int nn = static_cast<int>(n);
  const std::vector<std::uint32_t> candidates = subset_masks(nn, d);
  std::vector<std::uint32_t> alphas;
  for (std::uint32_t mask = 1; mask < (1u << nn); ++mask) {
    if (std::popcount(mask) <= k_max) alphas.push_back(mask);
  }

  // Exact P[I_a = 1] depends only on |a| by exchangeability:
  // internal-connectivity probability times (1-p)^{#crossing d-sets}.
  const int fact_cap = std::min(3, k_max);
  std::array<double, 4> expected_by_size{};
  for (int a = 1; a <= fact_cap; ++a) {
    const double conn = connected_probability((1u << a) - 1, d, p);
    const double crossing =
        binom(n, static_cast<std::uint64_t>(d)).as_double() -
        binom(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(d)).as_double() -
        binom(n - static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(d)).as_double();
    expected_by_size[static_cast<std::size_t>(a)] = conn * std::pow(1.0 - p, crossing);
  }

  std::vector<std::uint64_t> observed(1u << nn, 0);
  std::vector<std::uint64_t> comp_stamp(1u << nn, 0);
  std::vector<std::uint64_t> compa_stamp(1u << nn, 0);
  std::uint64_t gen_h = 0;
  std::uint64_t gen_a = 0;

  SteinAuditResult out;
  out.identity_graphs = std::min<std::uint64_t>(trials, 100);

  std::vector<std::uint32_t> edges;
  std::vector<std::uint32_t> comps, comps_a;
  edges.reserve(candidates.size());

  const auto build_comps = [nn](MiniUF& uf, std::vector<std::uint32_t>& comps_out) {
    std::array<std::uint32_t, 16> mask_of_root{};
    for (int v = 0; v < nn; ++v) {
      mask_of_root[static_cast<std::size_t>(uf.find(v))] |= 1u << v;
    }
    comps_out.clear();
    for (int v = 0; v < nn; ++v) {
      if (uf.find(v) == v) comps_out.push_back(mask_of_root[static_cast<std::size_t>(v)]);
    }
  };

  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, t));
    edges.clear();
    for (std::uint32_t e : candidates) {
      if (rng.bernoulli(p)) edges.push_back(e);
    }

    MiniUF uf;
    uf.reset(nn);
    for (std::uint32_t e : edges) {
      const int base = std::countr_zero(e);
      for (int v = base + 1; v < nn; ++v) {
        if (e & (1u << v)) uf.unite(base, v);
      }
    }
    build_comps(uf, comps);
    ++gen_h;
    for (std::uint32_t m : comps) comp_stamp[m] = gen_h;
    for (std::uint32_t m : comps) {
      if (std::popcount(m) <= fact_cap) ++observed[m];
    }

    if (t >= out.identity_graphs) continue;

    // Intersecting distinct a, b must satisfy Y_a Y_b = 0: components
    // partition the vertex set, so two distinct components never intersect.
    for (std::size_t i = 0; i < comps.size(); ++i) {
      for (std::size_t j = i + 1; j < comps.size(); ++j) {
        if (std::popcount(comps[i]) > k_max || std::popcount(comps[j]) > k_max) continue;
        ++out.identity_checks;
        if ((comps[i] & comps[j]) != 0) ++out.identity_violations;
      }
    }

    for (std::uint32_t a : alphas) {
      // If no edge meets a, deleting edges around a changes nothing and all
      // three identities hold with every factor unchanged; skip.
      bool meets = false;
      for (std::uint32_t e : edges) {
        if ((e & a) != 0) {
          meets = true;
          break;
        }
      }
      if (!meets) continue;

      MiniUF ufa;
      ufa.reset(nn);
      for (std::uint32_t e : edges) {
        if ((e & a) == 0) {
          const int base = std::countr_zero(e);
          for (int v = base + 1; v < nn; ++v) {
            if (e & (1u << v)) ufa.unite(base, v);
          }
        }
      }
      build_comps(ufa, comps_a);
      ++gen_a;
      for (std::uint32_t m : comps_a) compa_stamp[m] = gen_a;

      const bool a_is_comp = comp_stamp[a] == gen_h;

      // Pathwise check of the two remaining identities for every b whose
      // indicator could differ between H and the deletion. The products are
      // integers; any nonzero value is a violation.
      const auto scan_gammas = [&](std::uint32_t b) {
        for (const auto* pool : {&comps_a, &comps}) {
          for (std::uint32_t g : *pool) {
            if (g == b || (g & b) == 0 || (g & a) != 0 || std::popcount(g) > k_max) continue;
            ++out.identity_checks;
            const bool g_comp = comp_stamp[g] == gen_h;
            const bool g_comp_a = compa_stamp[g] == gen_a;
            if (g_comp || g_comp_a) ++out.identity_violations;
          }
        }
      };

      for (std::uint32_t b : comps_a) {
        if ((b & a) != 0 || std::popcount(b) > k_max) continue;
        const bool b_comp_h = comp_stamp[b] == gen_h;
        if (a_is_comp) {
          // (eq:del): Y_a (Y_b - Y_b^a) Y_b^a with Y_b^a != 0 here.
          ++out.identity_checks;
          if (!b_comp_h) ++out.identity_violations;
        }
        if (!b_comp_h) scan_gammas(b);
      }
      for (std::uint32_t b : comps) {
        if ((b & a) != 0 || std::popcount(b) > k_max) continue;
        if (compa_stamp[b] != gen_a) scan_gammas(b);
      }
    }
  }

  // Factorization z-scores across every subset of size <= fact_cap.
  for (std::uint32_t mask = 1; mask < (1u << nn); ++mask) {
    const int size = std::popcount(mask);
    if (size > fact_cap) continue;
    SteinAlphaStat stat;
    stat.mask = mask;
    stat.size = size;
    stat.expected = expected_by_size[static_cast<std::size_t>(size)];
    stat.observed = observed[mask];
    const double phat = static_cast<double>(stat.observed) / static_cast<double>(trials);
    if (stat.expected <= 0.0) {
      stat.z = stat.observed == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      const double se =
          std::sqrt(stat.expected * (1.0 - stat.expected) / static_cast<double>(trials));
      stat.z = (phat - stat.expected) / se;
    }
    out.max_abs_z = std::max(out.max_abs_z, std::abs(stat.z));
    out.factorization.push_back(stat);
  }

  out.report.test = "stein-audit";
  out.report.statistic = out.max_abs_z;
  out.report.threshold = 4.0;
  out.report.pass = out.identity_violations == 0 && out.max_abs_z <= 4.0;
  out.report.params = "n=" + std::to_string(n) + " d=" + std::to_string(d) +
                      " p=" + std::to_string(p) + " k_max=" + std::to_string(k_max);
  out.report.seed = seed;
  out.report.trials = trials;
  return out;
}

}  // namespace hgsim
