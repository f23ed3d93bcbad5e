#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hgsim/hypergraph.hpp"
#include "hgsim/theory.hpp"

namespace hgsim {

// Split of the edge probability p into two stages p1 = (1-eps)p and
// p2 = (p-p1)/(1-p1), chosen so that (1-p1)(1-p2) = 1-p: an edge drawn at p1,
// or else at p2 on the remainder, is present with probability exactly p.
struct ExposureConfig {
  double p = 0.0;
  double eps = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

ExposureConfig split_probabilities(double p, double eps);

// One run of the four-round exposure: round 1 draws the whole hypergraph at
// p1 and fixes G, the largest component; rounds 2-4 top up to the composite
// probability p on the d-sets inside the complement, crossing, and inside G
// respectively, each discarding edges already present. H4 is distributed as
// the one-shot model at p; the largest component stops growing after round 3
// because round-4 edges join vertices that are already together.
struct FourRoundTrace {
  ExposureConfig config;
  Hypergraph h1, h2, h3, h4;
  std::vector<Vertex> g;                  // largest component of h1, ascending
  std::array<std::uint64_t, 4> orders;    // largest-component order after each round
  std::int64_t s = 0;                     // orders[2] - orders[0]
};

FourRoundTrace run_four_rounds(std::uint64_t n, int d, double p, double eps,
                               std::uint64_t seed);

// Classification of the crossing-round edge set F relative to the frozen
// complement graph H2G (indices into the round-3 edge list):
//   f1: edges with >= 2 vertices outside G, or whose single outside vertex
//       lies in a component of H2G of order >= 2;
//   f2: remaining edges whose outside vertex also occurs in some f1 edge;
//   f3: the rest -- d-1 vertices in G, outside vertex isolated even after
//       adding the f1 and f2 edges.
struct Round3Classes {
  std::vector<std::uint32_t> f1, f2, f3;
};

// The conditional attachment law of the isolated vertices: W is the set of
// complement vertices isolated in H2G plus the f1/f2 edges; each attaches
// independently with probability q = 1 - (1-p2)^C(n1, d-1), and the attached
// ones are exactly the outside vertices of the f3 edges.
struct IsolatedAttachLaw {
  std::vector<Vertex> w;       // ascending
  double q = 0.0;
  std::uint64_t s_iso = 0;     // distinct outside vertices across f3 edges
  std::uint64_t s_big = 0;     // sg - s_iso, the ones reached through larger components
};

// The three-round surrogate process against a designated set G = {1..n1}:
// rounds 1' and 2' draw only inside the complement (at p1 then p2, discarding
// repeats), round 3' draws the crossing d-sets at p2. SG counts complement
// vertices reachable from G afterwards. The trace carries the full edge
// classification and attachment law, already consistency-checked.
struct ArtificialTrace {
  std::uint64_t n = 0;
  int d = 2;
  std::uint64_t n1 = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  Hypergraph h1g, h2g, h3g;
  std::vector<Vertex> round3_flat;  // the crossing-round edge set F, flat
  std::vector<Vertex> sg_set;       // complement vertices reachable from G, ascending
  std::uint64_t sg = 0;
  Round3Classes classes;
  IsolatedAttachLaw law;
};

ArtificialTrace run_artificial(std::uint64_t n, int d, std::uint64_t n1, double p1,
                               double p2, std::uint64_t seed);

// Reruns only round 3' on a frozen trace (new seed), reclassifying and
// rechecking. W is a function of rounds 1'-2' and the f1/f2 edges only; for
// d = 2 it is invariant across redraws, which is what makes the conditional
// binomial law of s_iso exactly testable.
ArtificialTrace resample_round3(const ArtificialTrace& trace, std::uint64_t seed);

// Standalone pieces of the trace pipeline (run_artificial calls both).
Round3Classes classify_round3(const ArtificialTrace& trace);
IsolatedAttachLaw isolated_attach(const ArtificialTrace& trace, const Round3Classes& classes);

// Empirical reach statistics over a batch of traces at identical parameters:
//   r_i    = P[vertex outside G sits in an H2G-component of order i and attaches]
//   rbar_i = the same joint probability with "does not attach"
// truncated at L = floor(ln^2 n) (pass l = 0 for that default), plus their
// aggregates r, R = sum i r_i, Rbar = sum i rbar_i packaged as GammaInputs for
// the variance formula. Components larger than L are tallied as anomalies.
struct ReachStats {
  GammaInputs inputs;
  std::vector<double> r_i;     // index 0 unused; 1..L
  std::vector<double> rbar_i;  // index 0 unused; 1..L
  std::uint64_t truncation = 0;
  std::uint64_t anomalies = 0;
};

// Streaming form: feed traces one at a time (so they can be dropped after
// their sg is recorded) and finish() once at least 100 have been added.
class ReachAccumulator {
 public:
  explicit ReachAccumulator(std::uint64_t l = 0);

  void add(const ArtificialTrace& trace);
  ReachStats finish() const;
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t l_override_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t n_ = 0;
  int d_ = 2;
  std::uint64_t n1_ = 0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::uint64_t truncation_ = 0;
  std::uint64_t anomalies_ = 0;
  std::vector<double> r_counts_;
  std::vector<double> rbar_counts_;
};

ReachStats estimate_reach_stats(const std::vector<ArtificialTrace>& traces,
                                std::uint64_t l = 0);

}  // namespace hgsim
