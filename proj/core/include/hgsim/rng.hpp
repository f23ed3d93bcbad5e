#pragma once

#include <cstdint>
#include <random>

namespace hgsim {

// Derives the seed for a numbered substream (trial index, exposure round, ...)
// from one master seed. This is the SplitMix64 output function (Steele, Lea &
// Flood, OOPSLA 2014) applied to master + (stream+1) * golden-gamma, so distinct
// stream indices give statistically independent seeds and stream 0 differs from
// the master itself. Every piece of randomness in the library flows through
// this: same master seed => bit-identical results, regardless of thread count.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic sampling primitives on top of mt19937_64. The standard library
// distributions are implementation-defined, so everything the library needs
// (uniform ints, unit doubles, Bernoulli, binomial) is implemented here against
// the fully specified engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound); unbiased via rejection of the wrap-around chunk.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t r;
    do {
      r = engine_();
    } while (r < threshold);
    return r % bound;
  }

  bool bernoulli(double p) { return next_unit() < p; }

  // Binomial(trials, p) with `trials` allowed to exceed 2^63 (then carried in
  // floating point; see numerics.hpp for the matching coefficient convention).
  // Inversion by sequential search when the mean is small, Hoermann's BTRS
  // transformed-rejection algorithm (J. Stat. Comput. Simul. 46, 1993) above.
  std::uint64_t binomial(double trials, double p);

 private:
  std::uint64_t binomial_small_mean(double trials, double p);
  std::uint64_t binomial_btrs(double trials, double p);

  std::mt19937_64 engine_;
};

}  // namespace hgsim
