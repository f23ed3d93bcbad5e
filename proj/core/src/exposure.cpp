#include "hgsim/exposure.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "hgsim/rng.hpp"
#include "hgsim/sampling.hpp"

namespace hgsim {
namespace {

// Sample the family at probability q and keep only edges not already present,
// registering the kept ones. Since p1 + (1-p1)p2 = p, topping up a p1-draw
// this way at p2 leaves every d-set present with probability exactly p.
std::vector<Vertex> sample_minus_existing(const EdgeFamily& family, double q, Rng& rng,
                                          EdgeKeySet& existing) {
  const std::vector<Vertex> flat = sample_family(family, q, rng);
  const auto d = static_cast<std::size_t>(family.d());
  std::vector<Vertex> kept;
  kept.reserve(flat.size());
  for (std::size_t i = 0; i < flat.size(); i += d) {
    const std::span<const Vertex> e{flat.data() + i, d};
    if (existing.insert(e)) kept.insert(kept.end(), e.begin(), e.end());
  }
  return kept;
}

std::vector<Vertex> iota_vertices(std::uint64_t from, std::uint64_t to) {
  std::vector<Vertex> out;
  out.reserve(to - from + 1);
  for (std::uint64_t v = from; v <= to; ++v) out.push_back(static_cast<Vertex>(v));
  return out;
}

// Order of every vertex's component, recounted from the labels so it does not
// depend on how the summary orders its size list.
std::vector<std::uint64_t> orders_by_label(const ComponentSummary& comp) {
  std::uint32_t max_label = 0;
  for (std::size_t v = 1; v < comp.labels.size(); ++v) {
    max_label = std::max(max_label, comp.labels[v]);
  }
  std::vector<std::uint64_t> count(static_cast<std::size_t>(max_label) + 1, 0);
  for (std::size_t v = 1; v < comp.labels.size(); ++v) ++count[comp.labels[v]];
  return count;
}

// Shared tail of run_artificial / resample_round3: extends the frozen
// complement graph by one crossing draw, computes reachability from G and the
// edge classification, and consistency-checks the pieces.
ArtificialTrace finish_trace(std::uint64_t n, int d, std::uint64_t n1, double p1, double p2,
                             Hypergraph h1g, Hypergraph h2g, std::vector<Vertex> round3_flat) {
  Hypergraph h3g = h2g.extended(round3_flat);

  // A complement vertex belongs to SG iff its component in H3G contains a
  // vertex of G = {1..n1}.
  const ComponentSummary comp3 = components(h3g);
  std::uint32_t max_label = 0;
  for (std::size_t v = 1; v < comp3.labels.size(); ++v) {
    max_label = std::max(max_label, comp3.labels[v]);
  }
  std::vector<char> has_g(static_cast<std::size_t>(max_label) + 1, 0);
  for (std::uint64_t v = 1; v <= n1; ++v) has_g[comp3.labels[v]] = 1;
  std::vector<Vertex> sg_set;
  for (std::uint64_t v = n1 + 1; v <= n; ++v) {
    if (has_g[comp3.labels[v]]) sg_set.push_back(static_cast<Vertex>(v));
  }
  const std::uint64_t sg = sg_set.size();

  ArtificialTrace t{n,
                    d,
                    n1,
                    p1,
                    p2,
                    std::move(h1g),
                    std::move(h2g),
                    std::move(h3g),
                    std::move(round3_flat),
                    std::move(sg_set),
                    sg,
                    {},
                    {}};
  t.classes = classify_round3(t);
  t.law = isolated_attach(t, t.classes);
  return t;
}

void check_artificial_params(std::uint64_t n, int d, std::uint64_t n1, double p1, double p2) {
  if (d < 2) throw std::invalid_argument("run_artificial: d must be >= 2");
  if (n < static_cast<std::uint64_t>(d)) throw std::invalid_argument("run_artificial: need n >= d");
  if (n1 < 1 || n1 >= n) throw std::invalid_argument("run_artificial: need 1 <= n1 < n");
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw std::invalid_argument("run_artificial: probabilities must be in [0,1]");
  }
}

}  // namespace

ExposureConfig split_probabilities(double p, double eps) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("split_probabilities: p must be in [0,1]");
  }
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("split_probabilities: eps must be in [0,1)");
  }
  ExposureConfig cfg;
  cfg.p = p;
  cfg.eps = eps;
  cfg.p1 = (1.0 - eps) * p;
  if (cfg.p1 >= 1.0) {
    throw std::domain_error("split_probabilities: p1 = 1 leaves no second stage");
  }
  cfg.p2 = (p - cfg.p1) / (1.0 - cfg.p1);
  return cfg;
}

FourRoundTrace run_four_rounds(std::uint64_t n, int d, double p, double eps,
                               std::uint64_t seed) {
  const ModelParams params = ModelParams::from_p(n, d, p);
  const ExposureConfig cfg = split_probabilities(p, eps);
  if (!((1.0 - eps) * params.c > 1.0 / (d - 1))) {
    throw std::domain_error("run_four_rounds: round-1 parameters are subcritical");
  }

  Rng r1(mix_seed(seed, 1));
  Rng r2(mix_seed(seed, 2));
  Rng r3(mix_seed(seed, 3));
  Rng r4(mix_seed(seed, 4));

  Hypergraph h1 =
      Hypergraph::trusted(d, n, sample_family(EdgeFamily::all(n, d), cfg.p1, r1));
  EdgeKeySet existing(n, d, h1.edge_count() * 2);
  for (std::size_t i = 0; i < h1.edge_count(); ++i) existing.insert(h1.edge(i));

  auto [l1, g] = largest_component(h1);
  std::vector<Vertex> rest;
  rest.reserve(static_cast<std::size_t>(n) - g.size());
  {
    std::size_t at = 0;
    for (std::uint64_t v = 1; v <= n; ++v) {
      if (at < g.size() && g[at] == v) {
        ++at;
      } else {
        rest.push_back(static_cast<Vertex>(v));
      }
    }
  }

  Hypergraph h2 = h1.extended(
      sample_minus_existing(EdgeFamily::inside(n, d, rest), cfg.p2, r2, existing));
  Hypergraph h3 = h2.extended(
      sample_minus_existing(EdgeFamily::crossing(n, d, g, rest), cfg.p2, r3, existing));
  Hypergraph h4 = h3.extended(
      sample_minus_existing(EdgeFamily::inside(n, d, g), cfg.p2, r4, existing));

  const std::uint64_t l2 = largest_component(h2).first;
  const std::uint64_t l3 = largest_component(h3).first;
  const std::uint64_t l4 = largest_component(h4).first;
  if (l3 != l4) {
    throw std::logic_error("run_four_rounds: round 4 changed the largest-component order");
  }

  return FourRoundTrace{cfg,
                        std::move(h1),
                        std::move(h2),
                        std::move(h3),
                        std::move(h4),
                        std::move(g),
                        {l1, l2, l3, l4},
                        static_cast<std::int64_t>(l3) - static_cast<std::int64_t>(l1)};
}

ArtificialTrace run_artificial(std::uint64_t n, int d, std::uint64_t n1, double p1,
                               double p2, std::uint64_t seed) {
  check_artificial_params(n, d, n1, p1, p2);
  const std::vector<Vertex> outside = iota_vertices(n1 + 1, n);

  Rng r1(mix_seed(seed, 1));
  Rng r2(mix_seed(seed, 2));
  Rng r3(mix_seed(seed, 3));

  Hypergraph h1g =
      Hypergraph::trusted(d, n, sample_family(EdgeFamily::inside(n, d, outside), p1, r1));
  EdgeKeySet existing(n, d, h1g.edge_count() * 2);
  for (std::size_t i = 0; i < h1g.edge_count(); ++i) existing.insert(h1g.edge(i));
  Hypergraph h2g = h1g.extended(
      sample_minus_existing(EdgeFamily::inside(n, d, outside), p2, r2, existing));

  // Crossing d-sets are never present after rounds 1'-2' (those draw only
  // inside the complement), so no discarding is needed here.
  std::vector<Vertex> round3 = sample_family(
      EdgeFamily::crossing(n, d, iota_vertices(1, n1), outside), p2, mix_seed(seed, 3));

  return finish_trace(n, d, n1, p1, p2, std::move(h1g), std::move(h2g), std::move(round3));
}

ArtificialTrace resample_round3(const ArtificialTrace& trace, std::uint64_t seed) {
  std::vector<Vertex> round3 =
      sample_family(EdgeFamily::crossing(trace.n, trace.d, iota_vertices(1, trace.n1),
                                         iota_vertices(trace.n1 + 1, trace.n)),
                    trace.p2, mix_seed(seed, 3));
  return finish_trace(trace.n, trace.d, trace.n1, trace.p1, trace.p2, trace.h1g, trace.h2g,
                      std::move(round3));
}

Round3Classes classify_round3(const ArtificialTrace& trace) {
  const auto d = static_cast<std::size_t>(trace.d);
  const std::size_t m = trace.round3_flat.size() / d;
  const ComponentSummary comp = components(trace.h2g);
  const std::vector<std::uint64_t> order = orders_by_label(comp);

  Round3Classes out;
  std::vector<std::uint32_t> pending;  // not in f1; exactly one outside vertex
  std::vector<char> covered(static_cast<std::size_t>(trace.n) + 1, 0);
  for (std::size_t e = 0; e < m; ++e) {
    const Vertex* v = trace.round3_flat.data() + e * d;
    int outside_count = 0;
    Vertex w = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (v[i] > trace.n1) {
        ++outside_count;
        w = v[i];
      }
    }
    if (outside_count == 0) {
      throw std::logic_error("classify_round3: crossing edge inside G");
    }
    if (outside_count >= 2 || order[comp.labels[w]] >= 2) {
      out.f1.push_back(static_cast<std::uint32_t>(e));
      for (std::size_t i = 0; i < d; ++i) {
        if (v[i] > trace.n1) covered[v[i]] = 1;
      }
    } else {
      pending.push_back(static_cast<std::uint32_t>(e));
    }
  }
  for (std::uint32_t e : pending) {
    const Vertex* v = trace.round3_flat.data() + static_cast<std::size_t>(e) * d;
    Vertex w = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (v[i] > trace.n1) w = v[i];
    }
    (covered[w] ? out.f2 : out.f3).push_back(e);
  }
  if (out.f1.size() + out.f2.size() + out.f3.size() != m) {
    throw std::logic_error("classify_round3: classes do not partition the edge set");
  }
  return out;
}

IsolatedAttachLaw isolated_attach(const ArtificialTrace& trace, const Round3Classes& classes) {
  const auto d = static_cast<std::size_t>(trace.d);
  if ((classes.f1.size() + classes.f2.size() + classes.f3.size()) * d !=
      trace.round3_flat.size()) {
    throw std::invalid_argument("isolated_attach: classification does not match the trace");
  }

  // Degree in H2G plus the f1/f2 edges; W is the degree-zero complement part.
  std::vector<char> touched(static_cast<std::size_t>(trace.n) + 1, 0);
  for (Vertex v : trace.h2g.flat()) touched[v] = 1;
  for (const auto& cls : {classes.f1, classes.f2}) {
    for (std::uint32_t e : cls) {
      const Vertex* v = trace.round3_flat.data() + static_cast<std::size_t>(e) * d;
      for (std::size_t i = 0; i < d; ++i) {
        if (v[i] > trace.n1) touched[v[i]] = 1;
      }
    }
  }

  IsolatedAttachLaw law;
  for (std::uint64_t v = trace.n1 + 1; v <= trace.n; ++v) {
    if (!touched[v]) law.w.push_back(static_cast<Vertex>(v));
  }
  // Per-vertex attachment probability 1 - (1-p2)^C(n1, d-1), evaluated in log
  // space (the exponent is astronomically large for d >= 3).
  const double candidates =
      binom(trace.n1, static_cast<std::uint64_t>(trace.d - 1)).as_double();
  law.q = (trace.p2 >= 1.0 && candidates > 0.0)
              ? 1.0
              : -std::expm1(candidates * std::log1p(-trace.p2));

  std::vector<char> iso_attached(static_cast<std::size_t>(trace.n) + 1, 0);
  for (std::uint32_t e : classes.f3) {
    const Vertex* v = trace.round3_flat.data() + static_cast<std::size_t>(e) * d;
    for (std::size_t i = 0; i < d; ++i) {
      if (v[i] > trace.n1) {
        if (touched[v[i]]) {
          throw std::logic_error("isolated_attach: f3 edge touches a non-isolated vertex");
        }
        iso_attached[v[i]] = 1;
      }
    }
  }
  for (std::uint64_t v = trace.n1 + 1; v <= trace.n; ++v) {
    if (iso_attached[v]) ++law.s_iso;
  }

  // The attached set splits into the isolated vertices (reached by f3 edges)
  // and everything reached through components of order >= 2.
  std::uint64_t big = 0;
  for (Vertex v : trace.sg_set) {
    if (!iso_attached[v]) ++big;
  }
  law.s_big = big;
  if (law.s_iso + law.s_big != trace.sg) {
    throw std::logic_error("isolated_attach: s_iso + s_big != sg");
  }
  if (law.s_iso > law.w.size()) {
    throw std::logic_error("isolated_attach: more attached isolated vertices than W holds");
  }
  return law;
}

ReachAccumulator::ReachAccumulator(std::uint64_t l) : l_override_(l) {}

void ReachAccumulator::add(const ArtificialTrace& trace) {
  if (count_ == 0) {
    n_ = trace.n;
    d_ = trace.d;
    n1_ = trace.n1;
    p1_ = trace.p1;
    p2_ = trace.p2;
    const double log_n = std::log(static_cast<double>(n_));
    truncation_ = l_override_ ? l_override_
                              : static_cast<std::uint64_t>(std::floor(log_n * log_n));
    r_counts_.assign(truncation_ + 1, 0.0);
    rbar_counts_.assign(truncation_ + 1, 0.0);
  } else if (trace.n != n_ || trace.d != d_ || trace.n1 != n1_ || trace.p1 != p1_ ||
             trace.p2 != p2_) {
    throw std::invalid_argument("ReachAccumulator: traces must share parameters");
  }
  ++count_;

  const ComponentSummary comp = components(trace.h2g);
  const std::vector<std::uint64_t> order = orders_by_label(comp);
  std::vector<char> attached(static_cast<std::size_t>(n_) + 1, 0);
  for (Vertex v : trace.sg_set) attached[v] = 1;
  for (std::uint64_t v = n1_ + 1; v <= n_; ++v) {
    const std::uint64_t i = order[comp.labels[v]];
    if (i > truncation_) {
      ++anomalies_;
    } else if (attached[v]) {
      r_counts_[i] += 1.0;
    } else {
      rbar_counts_[i] += 1.0;
    }
  }
}

ReachStats ReachAccumulator::finish() const {
  if (count_ < 100) {
    throw std::invalid_argument("ReachAccumulator: need at least 100 traces, have " +
                                std::to_string(count_));
  }
  const double denom =
      static_cast<double>(count_) * static_cast<double>(n_ - n1_);

  ReachStats out;
  out.truncation = truncation_;
  out.anomalies = anomalies_;
  out.r_i.assign(truncation_ + 1, 0.0);
  out.rbar_i.assign(truncation_ + 1, 0.0);
  double r = 0.0;
  double big_r = 0.0;
  double big_rbar = 0.0;
  for (std::uint64_t i = 1; i <= truncation_; ++i) {
    out.r_i[i] = r_counts_[i] / denom;
    out.rbar_i[i] = rbar_counts_[i] / denom;
    r += out.r_i[i];
    big_r += static_cast<double>(i) * out.r_i[i];
    big_rbar += static_cast<double>(i) * out.rbar_i[i];
  }

  const double p = 1.0 - (1.0 - p1_) * (1.0 - p2_);
  out.inputs.r = r;
  out.inputs.R = big_r;
  out.inputs.Rbar = big_rbar;
  out.inputs.alpha = 1.0 - static_cast<double>(n1_) / static_cast<double>(n_);
  out.inputs.c = binom(n_ - 1, static_cast<std::uint64_t>(d_ - 1)).as_double() * p;
  out.inputs.eps = p > 0.0 ? 1.0 - p1_ / p : 0.0;
  out.inputs.d = d_;
  out.inputs.n = static_cast<double>(n_);
  return out;
}

ReachStats estimate_reach_stats(const std::vector<ArtificialTrace>& traces, std::uint64_t l) {
  ReachAccumulator acc(l);
  for (const auto& t : traces) acc.add(t);
  return acc.finish();
}

}  // namespace hgsim
