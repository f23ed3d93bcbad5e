#pragma once

#include <cstdint>
#include <vector>

#include "hgsim/hypergraph.hpp"
#include "hgsim/rng.hpp"

namespace hgsim {

// Random d-uniform hypergraph with every d-set present independently with
// probability p. Realized exactly without touching all C(n,d) candidates:
// the edge count is drawn from Binomial(C(n,d), p), then that many distinct
// uniform d-sets are drawn (Floyd's subset sampling plus a rejection set),
// which reproduces the independent-edge law exactly in O(m) expected time.
Hypergraph sample_hnp(std::uint64_t n, int d, double p, std::uint64_t seed);

// Uniform hypergraph among those with exactly m distinct edges.
Hypergraph sample_hnm(std::uint64_t n, int d, std::uint64_t m, std::uint64_t seed);

// Independent Bernoulli(q) selection over one candidate family; returns the
// selected edges flat (d ids per edge, each ascending), in draw order.
// The building block for the staged exposure rounds.
std::vector<Vertex> sample_family(const EdgeFamily& family, double q, Rng& rng);
std::vector<Vertex> sample_family(const EdgeFamily& family, double q, std::uint64_t seed);

// Exactly m distinct uniform members of the family (m <= |family|).
std::vector<Vertex> sample_family_exact(const EdgeFamily& family, std::uint64_t m, Rng& rng);

}  // namespace hgsim
