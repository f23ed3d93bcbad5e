#include "hgsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hgsim/numerics.hpp"

namespace hgsim {
namespace {

// Families at or below this many members may be enumerated outright when a
// large fraction of them is requested; past a quarter of the family, rejection
// starts to burn draws on collisions and outright enumeration wins.
constexpr std::uint64_t kDenseLimit = 1ull << 22;

// Floyd's distinct-subset sampler (Bentley & Floyd, CACM 30(9), 1987):
// appends k distinct uniform indices from [0, pool) to out, unsorted.
// Exactly k calls to the generator's below(); the membership scan is O(k^2)
// with k <= d, i.e. negligible.
void floyd_indices(Rng& rng, std::uint64_t pool, int k, std::vector<Vertex>& out) {
  const std::size_t base = out.size();
  for (std::uint64_t j = pool - static_cast<std::uint64_t>(k); j < pool; ++j) {
    const auto t = static_cast<Vertex>(rng.below(j + 1));
    bool dup = false;
    for (std::size_t i = base; i < out.size(); ++i) {
      if (out[i] == t) {
        dup = true;
        break;
      }
    }
    out.push_back(dup ? static_cast<Vertex>(j) : t);
  }
}

// Draws uniform members of one candidate family. All/Inside reduce to Floyd
// over the pool. Crossing/MeetingAll use composition sampling: pick how many
// vertices the edge takes from each distinguished set (and from the rest) with
// probability proportional to the number of such edges, then draw each part
// uniformly. The composition table has at most d^3 rows, so exact uniformity
// over the family costs O(d) per edge regardless of n.
class MemberDrawer {
 public:
  explicit MemberDrawer(const EdgeFamily& f) : f_(f) {
    if (f.kind() == EdgeFamily::Kind::All || f.kind() == EdgeFamily::Kind::Inside) return;
    build_rest();
    build_cells();
  }

  // Fills `edge` with one uniform family member, ascending.
  void draw(Rng& rng, std::vector<Vertex>& edge) {
    edge.clear();
    const int d = f_.d();
    switch (f_.kind()) {
      case EdgeFamily::Kind::All:
        floyd_indices(rng, f_.n(), d, edge);
        for (auto& v : edge) ++v;  // indices 0..n-1 -> ids 1..n
        break;
      case EdgeFamily::Kind::Inside: {
        const auto& s = f_.sets()[0];
        scratch_.clear();
        floyd_indices(rng, s.size(), d, scratch_);
        for (Vertex idx : scratch_) edge.push_back(s[idx]);
        break;
      }
      case EdgeFamily::Kind::Crossing:
      case EdgeFamily::Kind::MeetingAll: {
        const Cell& cell = pick_cell(rng);
        for (std::size_t j = 0; j < f_.sets().size(); ++j) {
          draw_from(rng, f_.sets()[j], cell.take[j], edge);
        }
        draw_from(rng, rest_, cell.take[3], edge);
        break;
      }
    }
    std::sort(edge.begin(), edge.end());
  }

  bool has_members() const {
    return f_.kind() == EdgeFamily::Kind::All || f_.kind() == EdgeFamily::Kind::Inside ||
           !cells_.empty();
  }

 private:
  struct Cell {
    int take[4] = {0, 0, 0, 0};  // per distinguished set; [3] is the rest
  };

  void draw_from(Rng& rng, const std::vector<Vertex>& pool, int k, std::vector<Vertex>& edge) {
    if (k == 0) return;
    scratch_.clear();
    floyd_indices(rng, pool.size(), k, scratch_);
    for (Vertex idx : scratch_) edge.push_back(pool[idx]);
  }

  // Complement of the distinguished sets within 1..n, ascending.
  void build_rest() {
    std::vector<Vertex> merged;
    for (const auto& s : f_.sets()) merged.insert(merged.end(), s.begin(), s.end());
    std::sort(merged.begin(), merged.end());
    rest_.reserve(static_cast<std::size_t>(f_.n()) - merged.size());
    std::size_t at = 0;
    for (std::uint64_t v = 1; v <= f_.n(); ++v) {
      if (at < merged.size() && merged[at] == v) {
        ++at;
      } else {
        rest_.push_back(static_cast<Vertex>(v));
      }
    }
  }

  // Enumerate compositions (c_1,...,c_k, c_rest) with every c_j >= 1,
  // sum = d, weights C(|V_1|,c_1)...C(|V_k|,c_k)C(|rest|,c_rest). Weights are
  // handled in log space and normalized, so huge set sizes cannot overflow.
  void build_cells() {
    const int d = f_.d();
    const auto& sets = f_.sets();
    const int k = static_cast<int>(sets.size());
    Cell cur;
    std::vector<double> logw;
    double max_logw = -std::numeric_limits<double>::infinity();

    auto recurse = [&](auto&& self, int j, int remaining, double log_acc) -> void {
      if (j == k) {
        if (remaining > static_cast<int>(rest_.size())) return;
        cur.take[3] = remaining;
        const double lw = log_acc + log_choose(static_cast<double>(rest_.size()),
                                               static_cast<double>(remaining));
        cells_.push_back(cur);
        logw.push_back(lw);
        max_logw = std::max(max_logw, lw);
        return;
      }
      const int cap = std::min<int>(static_cast<int>(sets[j].size()), remaining - (k - 1 - j));
      for (int c = 1; c <= cap; ++c) {
        cur.take[j] = c;
        self(self, j + 1, remaining - c,
             log_acc + log_choose(static_cast<double>(sets[j].size()), static_cast<double>(c)));
      }
    };
    recurse(recurse, 0, d, 0.0);

    cum_.resize(cells_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      total += std::exp(logw[i] - max_logw);
      cum_[i] = total;
    }
    for (double& c : cum_) c /= total;
    if (!cum_.empty()) cum_.back() = 1.0;  // guard the top against rounding
  }

  const Cell& pick_cell(Rng& rng) {
    const double u = rng.next_unit();
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    return cells_[static_cast<std::size_t>(it - cum_.begin())];
  }

  const EdgeFamily& f_;
  std::vector<Vertex> rest_;
  std::vector<Cell> cells_;
  std::vector<double> cum_;
  std::vector<Vertex> scratch_;
};

// Lexicographic enumeration of the whole family, flat. Only called for
// families small enough to hold in memory (kDenseLimit).
std::vector<Vertex> enumerate_family(const EdgeFamily& f) {
  const int d = f.d();
  std::vector<Vertex> pool;
  if (f.kind() == EdgeFamily::Kind::Inside) {
    pool = f.sets()[0];
  } else {
    pool.resize(static_cast<std::size_t>(f.n()));
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<Vertex>(i + 1);
  }
  const bool filter =
      f.kind() == EdgeFamily::Kind::Crossing || f.kind() == EdgeFamily::Kind::MeetingAll;

  std::vector<Vertex> flat;
  if (pool.size() < static_cast<std::size_t>(d)) return flat;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
  std::vector<Vertex> edge(static_cast<std::size_t>(d));
  while (true) {
    for (int i = 0; i < d; ++i) edge[static_cast<std::size_t>(i)] = pool[idx[static_cast<std::size_t>(i)]];
    if (!filter || f.contains(edge)) flat.insert(flat.end(), edge.begin(), edge.end());
    // advance to the next d-combination of pool indices
    int i = d - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == pool.size() - static_cast<std::size_t>(d - i)) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return flat;
}

bool dense_eligible(const EdgeFamily& f, const BinomValue& card, std::uint64_t m) {
  if (!card.exact || card.value > kDenseLimit) return false;
  if (static_cast<unsigned __int128>(m) * 4 < card.value) return false;
  if (f.kind() == EdgeFamily::Kind::All || f.kind() == EdgeFamily::Kind::Inside) return true;
  // enumeration of crossing families walks the full ground set
  const BinomValue ground = binom(f.n(), static_cast<std::uint64_t>(f.d()));
  return ground.exact && ground.value <= kDenseLimit;
}

// Exactly m distinct members via enumeration plus a partial Fisher-Yates
// shuffle of the member indices.
std::vector<Vertex> dense_exact(const EdgeFamily& f, std::uint64_t m, Rng& rng) {
  const std::vector<Vertex> all = enumerate_family(f);
  const std::size_t d = static_cast<std::size_t>(f.d());
  const std::uint64_t count = all.size() / d;
  std::vector<std::uint32_t> order(count);
  for (std::uint64_t i = 0; i < count; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::vector<Vertex> flat;
  flat.reserve(m * d);
  for (std::uint64_t i = 0; i < m; ++i) {
    const std::uint64_t j = i + rng.below(count - i);
    std::swap(order[i], order[j]);
    const Vertex* e = all.data() + static_cast<std::size_t>(order[i]) * d;
    flat.insert(flat.end(), e, e + d);
  }
  return flat;
}

std::vector<Vertex> collect_distinct(const EdgeFamily& f, std::uint64_t m, Rng& rng) {
  if (m == 0) return {};
  const BinomValue card = f.cardinality();
  if (card.exact && static_cast<unsigned __int128>(m) > card.value) {
    throw std::invalid_argument("requested more edges than the family holds");
  }
  if (dense_eligible(f, card, m)) return dense_exact(f, m, rng);

  MemberDrawer drawer(f);
  if (!drawer.has_members()) {
    throw std::logic_error("family reported nonzero cardinality but has no compositions");
  }
  EdgeKeySet seen(f.n(), f.d(), static_cast<std::size_t>(m));
  std::vector<Vertex> flat;
  flat.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(f.d()));
  std::vector<Vertex> edge;
  while (seen.size() < m) {
    drawer.draw(rng, edge);
    if (seen.insert(edge)) flat.insert(flat.end(), edge.begin(), edge.end());
  }
  return flat;
}

void check_probability(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("edge probability must be in [0,1]");
}

}  // namespace

std::vector<Vertex> sample_family(const EdgeFamily& family, double q, Rng& rng) {
  check_probability(q);
  const BinomValue card = family.cardinality();
  if (q == 0.0 || card.approx == 0.0) return {};
  const std::uint64_t m = rng.binomial(card.as_double(), q);
  return collect_distinct(family, m, rng);
}

std::vector<Vertex> sample_family(const EdgeFamily& family, double q, std::uint64_t seed) {
  Rng rng(seed);
  return sample_family(family, q, rng);
}

std::vector<Vertex> sample_family_exact(const EdgeFamily& family, std::uint64_t m, Rng& rng) {
  return collect_distinct(family, m, rng);
}

Hypergraph sample_hnp(std::uint64_t n, int d, double p, std::uint64_t seed) {
  check_probability(p);
  Rng rng(seed);
  auto flat = sample_family(EdgeFamily::all(n, d), p, rng);
  return Hypergraph::trusted(d, n, std::move(flat));
}

Hypergraph sample_hnm(std::uint64_t n, int d, std::uint64_t m, std::uint64_t seed) {
  Rng rng(seed);
  auto flat = sample_family_exact(EdgeFamily::all(n, d), m, rng);
  return Hypergraph::trusted(d, n, std::move(flat));
}

}  // namespace hgsim
