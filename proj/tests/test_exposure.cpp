#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "hgsim/exposure.hpp"
#include "hgsim/hypergraph.hpp"
#include "hgsim/rng.hpp"

using namespace hgsim;

namespace {

// Independent reclassification of the round-3 edges, straight from the
// definitions, using the search-based component oracle. Returns index sets.
struct OracleClasses {
  std::set<std::uint32_t> f1, f2, f3;
  std::vector<Vertex> w;
  std::set<Vertex> iso_attached;
};

OracleClasses reclassify(const ArtificialTrace& t) {
  OracleClasses out;
  const ComponentSummary comp = components_oracle(t.h2g);
  std::vector<std::uint64_t> order_of(t.n + 1, 0);
  // recount component orders by label
  std::vector<std::uint64_t> by_label;
  for (Vertex v = 1; v <= t.n; ++v) {
    const std::uint32_t lab = comp.labels[v];
    if (lab >= by_label.size()) by_label.resize(lab + 1, 0);
    ++by_label[lab];
  }
  for (Vertex v = 1; v <= t.n; ++v) order_of[v] = by_label[comp.labels[v]];

  const std::size_t d = std::size_t(t.d);
  const std::size_t m3 = t.round3_flat.size() / d;
  auto outside_of = [&](std::size_t e) {
    std::vector<Vertex> o;
    for (std::size_t j = 0; j < d; ++j) {
      const Vertex v = t.round3_flat[e * d + j];
      if (v > t.n1) o.push_back(v);
    }
    return o;
  };

  std::set<Vertex> covered;
  for (std::size_t e = 0; e < m3; ++e) {
    const std::vector<Vertex> o = outside_of(e);
    REQUIRE(!o.empty());  // crossing edges always leave G
    bool f1 = o.size() >= 2;
    for (Vertex v : o) f1 = f1 || order_of[v] >= 2;
    if (f1) {
      out.f1.insert(std::uint32_t(e));
      for (Vertex v : o) covered.insert(v);
    }
  }
  for (std::size_t e = 0; e < m3; ++e) {
    if (out.f1.count(std::uint32_t(e))) continue;
    const std::vector<Vertex> o = outside_of(e);
    if (covered.count(o[0])) {
      out.f2.insert(std::uint32_t(e));
    } else {
      out.f3.insert(std::uint32_t(e));
      out.iso_attached.insert(o[0]);
    }
  }

  // W: outside vertices with no h2g edge and not an outside vertex of f1/f2
  std::set<Vertex> touched;
  for (Vertex v : t.h2g.flat()) touched.insert(v);
  for (const auto& idx : {out.f1, out.f2}) {
    for (std::uint32_t e : idx) {
      for (Vertex v : outside_of(e)) touched.insert(v);
    }
  }
  for (Vertex v = Vertex(t.n1 + 1); v <= t.n; ++v) {
    if (!touched.count(v)) out.w.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("probability split multiplies back to p") {
  for (double p : {1e-4, 0.01, 0.3, 0.9}) {
    for (double eps : {0.0, 0.05, 0.1, 0.5, 0.9}) {
      const ExposureConfig c = split_probabilities(p, eps);
      CHECK(c.p1 == doctest::Approx((1 - eps) * p).epsilon(1e-14));
      CHECK((1 - c.p1) * (1 - c.p2) == doctest::Approx(1 - p).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(split_probabilities(1.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(split_probabilities(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("four rounds: monotone growth, stalled round 4, composite law") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FourRoundTrace t = run_four_rounds(2000, 2, 2.0 / 1999.0, 0.1, seed);
    CHECK(t.orders[0] <= t.orders[1]);
    CHECK(t.orders[1] <= t.orders[2]);
    CHECK(t.orders[2] == t.orders[3]);  // round 4 never changes the largest order
    CHECK(t.s == std::int64_t(t.orders[2]) - std::int64_t(t.orders[0]));
    CHECK(t.h1.edge_count() <= t.h2.edge_count());
    CHECK(t.h2.edge_count() <= t.h3.edge_count());
    CHECK(t.h3.edge_count() <= t.h4.edge_count());
    CHECK(std::uint64_t(t.g.size()) == t.orders[0]);
    CHECK(std::is_sorted(t.g.begin(), t.g.end()));

    // h4 edges are all distinct and valid by construction; largest component
    // of the final graph must equal the recorded order
    CHECK(largest_component(t.h4).first == t.orders[3]);
  }

  // eps=0: no second portion, all four rounds coincide
  const FourRoundTrace z = run_four_rounds(1000, 2, 0.002, 0.0, 3);
  CHECK(z.orders[0] == z.orders[3]);
  CHECK(z.s == 0);
  CHECK(z.h1.edge_count() == z.h4.edge_count());

  CHECK_THROWS_AS(run_four_rounds(1000, 2, 0.5 / 999.0, 0.1, 0), std::domain_error);
}

TEST_CASE("four-round h4 edge count matches the one-shot model on average") {
  const std::uint64_t n = 2000;
  const double p = 2.0 / 1999.0;
  const int trials = 200;
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    total += double(run_four_rounds(n, 2, p, 0.1, mix_seed(100, t)).h4.edge_count());
  }
  const double mean = binom(n, 2).as_double() * p;
  const double se = std::sqrt(mean * (1 - p) / trials);
  CHECK(std::abs(total / trials - mean) <= 4 * se);
}

TEST_CASE("four rounds are a pure function of the seed") {
  const FourRoundTrace a = run_four_rounds(1500, 3, 2e-6, 0.1, 11);
  const FourRoundTrace b = run_four_rounds(1500, 3, 2e-6, 0.1, 11);
  CHECK(a.h4.flat() == b.h4.flat());
  CHECK(a.orders == b.orders);
}

TEST_CASE("artificial trace classification matches the brute-force oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = (seed % 2) ? 3 : 2;
    const ArtificialTrace t = run_artificial(120, d, 40, 0.01, 0.004, seed);
    const OracleClasses oc = reclassify(t);

    CHECK(std::set<std::uint32_t>(t.classes.f1.begin(), t.classes.f1.end()) == oc.f1);
    CHECK(std::set<std::uint32_t>(t.classes.f2.begin(), t.classes.f2.end()) == oc.f2);
    CHECK(std::set<std::uint32_t>(t.classes.f3.begin(), t.classes.f3.end()) == oc.f3);
    CHECK(t.law.w == oc.w);
    CHECK(t.law.s_iso == oc.iso_attached.size());
    CHECK(t.law.s_iso + t.law.s_big == t.sg);
    CHECK(t.classes.f1.size() + t.classes.f2.size() + t.classes.f3.size() ==
          t.round3_flat.size() / std::size_t(d));

    // SG from the oracle components of h3g
    const ComponentSummary comp = components_oracle(t.h3g);
    std::vector<char> has_g(comp.sizes.size(), 0);
    for (Vertex v = 1; v <= t.n1; ++v) has_g[comp.labels[v]] = 1;
    std::vector<Vertex> sg_oracle;
    for (Vertex v = Vertex(t.n1 + 1); v <= t.n; ++v) {
      if (has_g[comp.labels[v]]) sg_oracle.push_back(v);
    }
    CHECK(t.sg_set == sg_oracle);
    CHECK(t.sg == sg_oracle.size());

    // every attached isolated vertex is in W
    for (Vertex v : oc.iso_attached) {
      CHECK(std::binary_search(t.law.w.begin(), t.law.w.end(), v));
    }
  }
}

TEST_CASE("resampling round 3' freezes W when d=2") {
  const ArtificialTrace base = run_artificial(500, 2, 180, 0.004, 0.002, 5);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const ArtificialTrace re = resample_round3(base, seed);
    CHECK(re.h2g.flat() == base.h2g.flat());   // rounds 1'-2' untouched
    CHECK(re.classes.f2.empty());              // d=2: no f2 edges exist
    CHECK(re.law.w == base.law.w);             // the frozen-W property
    CHECK(re.law.q == doctest::Approx(base.law.q).epsilon(1e-15));
    CHECK(re.law.s_iso + re.law.s_big == re.sg);
  }
  // same resample seed, same outcome
  const ArtificialTrace r1 = resample_round3(base, 3);
  const ArtificialTrace r2 = resample_round3(base, 3);
  CHECK(r1.round3_flat == r2.round3_flat);
  CHECK(r1.sg == r2.sg);
}

TEST_CASE("attachment probability q matches the closed form") {
  const ArtificialTrace t = run_artificial(300, 2, 100, 0.005, 0.003, 9);
  const double direct = 1.0 - std::pow(1.0 - 0.003, 100.0);  // C(100,1) candidate edges
  CHECK(t.law.q == doctest::Approx(direct).epsilon(1e-12));

  const ArtificialTrace t3 = run_artificial(60, 3, 20, 0.004, 0.002, 9);
  const double direct3 = 1.0 - std::pow(1.0 - 0.002, 190.0);  // C(20,2) = 190
  CHECK(t3.law.q == doctest::Approx(direct3).epsilon(1e-12));
}

TEST_CASE("artificial trace parameter validation") {
  CHECK_THROWS_AS(run_artificial(100, 2, 0, 0.01, 0.01, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_artificial(100, 2, 100, 0.01, 0.01, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_artificial(100, 2, 50, 1.5, 0.01, 0), std::invalid_argument);
}

TEST_CASE("reach statistics against a direct recount") {
  std::vector<ArtificialTrace> traces;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    traces.push_back(run_artificial(400, 2, 150, 0.004, 0.0025, mix_seed(55, seed)));
  }
  const ReachStats rs = estimate_reach_stats(traces, 0);
  const std::uint64_t L = std::uint64_t(std::floor(std::log(400.0) * std::log(400.0)));
  CHECK(rs.truncation == L);
  CHECK(rs.r_i.size() == L + 1);

  // recount r_i / rbar_i from scratch
  std::vector<double> r(L + 1, 0.0), rb(L + 1, 0.0);
  std::uint64_t anomalies = 0;
  for (const ArtificialTrace& t : traces) {
    const ComponentSummary comp = components_oracle(t.h2g);
    std::vector<std::uint64_t> by_label;
    for (Vertex v = 1; v <= t.n; ++v) {
      const std::uint32_t lab = comp.labels[v];
      if (lab >= by_label.size()) by_label.resize(lab + 1, 0);
      ++by_label[lab];
    }
    for (Vertex v = Vertex(t.n1 + 1); v <= t.n; ++v) {
      const std::uint64_t order = by_label[comp.labels[v]];
      const bool attached = std::binary_search(t.sg_set.begin(), t.sg_set.end(), v);
      if (order > L) {
        ++anomalies;
        continue;
      }
      (attached ? r : rb)[order] += 1.0;
    }
  }
  const double denom = double(traces.size()) * (400.0 - 150.0);
  double rsum = 0, R = 0, Rbar = 0;
  for (std::uint64_t i = 1; i <= L; ++i) {
    CHECK(rs.r_i[i] == doctest::Approx(r[i] / denom).epsilon(1e-12));
    CHECK(rs.rbar_i[i] == doctest::Approx(rb[i] / denom).epsilon(1e-12));
    rsum += r[i] / denom;
    R += double(i) * r[i] / denom;
    Rbar += double(i) * rb[i] / denom;
  }
  CHECK(rs.anomalies == anomalies);
  CHECK(rs.inputs.r == doctest::Approx(rsum).epsilon(1e-12));
  CHECK(rs.inputs.R == doctest::Approx(R).epsilon(1e-12));
  CHECK(rs.inputs.Rbar == doctest::Approx(Rbar).epsilon(1e-12));
  CHECK(rs.inputs.alpha == doctest::Approx(1.0 - 150.0 / 400.0).epsilon(1e-12));

  // streaming accumulator gives the identical result
  ReachAccumulator acc;
  for (const ArtificialTrace& t : traces) acc.add(t);
  const ReachStats rs2 = acc.finish();
  CHECK(rs2.inputs.r == rs.inputs.r);
  CHECK(rs2.inputs.R == rs.inputs.R);
  CHECK(rs2.inputs.Rbar == rs.inputs.Rbar);
  CHECK(rs2.anomalies == rs.anomalies);
}

TEST_CASE("reach statistics degenerate splits") {
  // p2 = 0: nothing attaches, r = R = 0, Rbar > 0
  std::vector<ArtificialTrace> traces;
  for (std::uint64_t seed = 0; seed < 110; ++seed) {
    traces.push_back(run_artificial(300, 2, 100, 0.004, 0.0, mix_seed(77, seed)));
  }
  const ReachStats rs = estimate_reach_stats(traces);
  CHECK(rs.inputs.r == 0.0);
  CHECK(rs.inputs.R == 0.0);
  CHECK(rs.inputs.Rbar > 0.0);

  ReachAccumulator tiny;
  tiny.add(traces[0]);
  CHECK_THROWS_AS(tiny.finish(), std::invalid_argument);  // < 100 traces
}

TEST_CASE("oversized complement components count as anomalies") {
  // supercritical complement: most outside vertices sit in one giant
  // component far above floor(ln^2 n)
  std::vector<ArtificialTrace> traces;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    traces.push_back(run_artificial(100, 2, 30, 0.06, 0.001, mix_seed(88, seed)));
  }
  const ReachStats rs = estimate_reach_stats(traces);
  CHECK(rs.anomalies > 0);
}
