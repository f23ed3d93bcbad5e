#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "hgsim/numerics.hpp"

namespace hgsim {

using Vertex = std::uint32_t;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable d-uniform hypergraph on vertices 1..n. Edges are stored flat
// (d consecutive vertex ids per edge, ascending within each edge); duplicate
// edges are forbidden. Safe to share read-only across threads.
class Hypergraph {
 public:
  // Validates every invariant: d >= 2, vertex ids in 1..n, ascending distinct
  // ids within each edge, no duplicate edges, flat size a multiple of d.
  Hypergraph(int d, std::uint64_t n, std::vector<Vertex> flat_edges);

  // For internal builders (samplers, exposure rounds) whose construction
  // already guarantees the invariants; skips the O(m) duplicate check.
  static Hypergraph trusted(int d, std::uint64_t n, std::vector<Vertex> flat_edges);

  int d() const { return d_; }
  std::uint64_t n() const { return n_; }
  std::size_t edge_count() const { return flat_.size() / d_; }
  std::span<const Vertex> edge(std::size_t i) const {
    return {flat_.data() + i * d_, static_cast<std::size_t>(d_)};
  }
  const std::vector<Vertex>& flat() const { return flat_; }

  // New hypergraph with the given edges appended (caller guarantees they are
  // valid, sorted within themselves, and distinct from the existing ones).
  Hypergraph extended(std::span<const Vertex> more_flat) const;

 private:
  struct Trusted {};
  Hypergraph(Trusted, int d, std::uint64_t n, std::vector<Vertex> flat_edges);

  int d_;
  std::uint64_t n_;
  std::vector<Vertex> flat_;
};

struct ComponentSummary {
  std::vector<std::uint32_t> labels;     // size n+1, labels[0] unused; ids by first appearance
  std::vector<std::uint64_t> sizes;      // descending
  std::uint64_t largest_order = 0;
  std::vector<Vertex> largest_vertices;  // ascending; lexicographically first among ties
};

// Union-find component decomposition (union by size, path halving).
ComponentSummary components(const Hypergraph& h);

// (order, vertex list) of the largest component, ties broken lexicographically.
std::pair<std::uint64_t, std::vector<Vertex>> largest_component(const Hypergraph& h);

// Independent implementation via graph search over the vertex-edge incidence
// structure; the equivalence oracle for components(). Meant for small instances.
ComponentSummary components_oracle(const Hypergraph& h);

// Families of candidate d-sets over 1..n, used by the exposure rounds:
//   All          every d-subset of {1..n}
//   Inside(S)    d-subsets of S
//   Crossing(A,B)     d-subsets meeting both A and B (disjoint A, B)
//   MeetingAll(V1..Vk) d-subsets meeting every Vi (k <= 3, disjoint)
// Cardinalities come out in closed form by inclusion/exclusion.
class EdgeFamily {
 public:
  enum class Kind { All, Inside, Crossing, MeetingAll };

  static EdgeFamily all(std::uint64_t n, int d);
  static EdgeFamily inside(std::uint64_t n, int d, std::vector<Vertex> s);
  static EdgeFamily crossing(std::uint64_t n, int d, std::vector<Vertex> a,
                             std::vector<Vertex> b);
  static EdgeFamily meeting_all(std::uint64_t n, int d,
                                std::vector<std::vector<Vertex>> sets);

  Kind kind() const { return kind_; }
  std::uint64_t n() const { return n_; }
  int d() const { return d_; }
  const std::vector<std::vector<Vertex>>& sets() const { return sets_; }

  BinomValue cardinality() const;
  bool contains(std::span<const Vertex> edge) const;

 private:
  EdgeFamily(Kind kind, std::uint64_t n, int d, std::vector<std::vector<Vertex>> sets);

  Kind kind_;
  std::uint64_t n_;
  int d_;
  std::vector<std::vector<Vertex>> sets_;  // each ascending; pairwise disjoint
};

// |E_d(V1,...,Vk)|: the number of d-subsets of {1..n} meeting every Vi
// (k <= 3, pairwise disjoint), by inclusion/exclusion over binomials.
BinomValue count_crossing_edges(std::uint64_t n, int d,
                                const std::vector<std::vector<Vertex>>& sets);

// Exact membership set for edges, used to deduplicate samples and to discard
// already-present edges between exposure rounds. Edges pack injectively into
// a 128-bit key whenever d*ceil(log2(n+1)) <= 128 (every practical case);
// otherwise an exact vector-keyed set takes over. Never hash-lossy.
class EdgeKeySet {
 public:
  EdgeKeySet(std::uint64_t n, int d, std::size_t expected = 0);

  bool insert(std::span<const Vertex> edge);   // false if already present
  bool contains(std::span<const Vertex> edge) const;
  std::size_t size() const;

 private:
  unsigned __int128 pack(std::span<const Vertex> edge) const;

  int bits_per_vertex_;
  bool packed_;
  struct U128Hash {
    std::size_t operator()(unsigned __int128 v) const {
      std::uint64_t z = static_cast<std::uint64_t>(v) ^
                        (static_cast<std::uint64_t>(v >> 64) * 0x9E3779B97F4A7C15ULL);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      return static_cast<std::size_t>(z ^ (z >> 31));
    }
  };
  struct VecHash {
    std::size_t operator()(const std::vector<Vertex>& e) const {
      std::uint64_t z = 0x510e527fade682d1ULL;
      for (Vertex v : e) z = (z ^ v) * 0x9E3779B97F4A7C15ULL;
      return static_cast<std::size_t>(z ^ (z >> 31));
    }
  };
  std::unordered_set<unsigned __int128, U128Hash> packed_set_;
  std::unordered_set<std::vector<Vertex>, VecHash> vec_set_;
};

// Plain-text serialization:
//   line 1:  "HG <d> <n> <m>"
//   then m lines of d ascending space-separated 1-based vertex ids,
//   edge lines in lexicographic order, LF endings.
// read_hg accepts edge lines in any order but rejects duplicates, out-of-range
// ids, and non-ascending lines; write_hg always emits the canonical order.
Hypergraph read_hg(std::istream& in);
Hypergraph read_hg_file(const std::string& path);
void write_hg(const Hypergraph& h, std::ostream& out);
void write_hg_file(const Hypergraph& h, const std::string& path);

}  // namespace hgsim
