#include "hgsim/hypergraph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hgsim {

namespace {

void validate_edge_shape(int d, std::uint64_t n, std::span<const Vertex> e) {
  for (int i = 0; i < d; ++i) {
    if (e[i] < 1 || e[i] > n) {
      throw std::invalid_argument("edge vertex out of range 1..n");
    }
    if (i > 0 && e[i] <= e[i - 1]) {
      throw std::invalid_argument("edge vertices must be strictly ascending");
    }
  }
}

}  // namespace

Hypergraph::Hypergraph(int d, std::uint64_t n, std::vector<Vertex> flat_edges)
    : d_(d), n_(n), flat_(std::move(flat_edges)) {
  if (d_ < 2) throw std::invalid_argument("Hypergraph: d must be >= 2");
  if (n_ < static_cast<std::uint64_t>(d_)) {
    throw std::invalid_argument("Hypergraph: need n >= d");
  }
  if (n_ > std::numeric_limits<Vertex>::max()) {
    throw std::invalid_argument("Hypergraph: n exceeds 32-bit vertex ids");
  }
  if (flat_.size() % d_ != 0) {
    throw std::invalid_argument("Hypergraph: flat edge list not a multiple of d");
  }
  EdgeKeySet seen(n_, d_, edge_count());
  for (std::size_t i = 0; i < edge_count(); ++i) {
    validate_edge_shape(d_, n_, edge(i));
    if (!seen.insert(edge(i))) {
      throw std::invalid_argument("Hypergraph: duplicate edge");
    }
  }
}

Hypergraph::Hypergraph(Trusted, int d, std::uint64_t n, std::vector<Vertex> flat_edges)
    : d_(d), n_(n), flat_(std::move(flat_edges)) {}

Hypergraph Hypergraph::trusted(int d, std::uint64_t n, std::vector<Vertex> flat_edges) {
  return Hypergraph(Trusted{}, d, n, std::move(flat_edges));
}

Hypergraph Hypergraph::extended(std::span<const Vertex> more_flat) const {
  std::vector<Vertex> flat = flat_;
  flat.insert(flat.end(), more_flat.begin(), more_flat.end());
  return Hypergraph(Trusted{}, d_, n_, std::move(flat));
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), Vertex{0});
  }

  Vertex find(Vertex x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];  // path halving
      x = parent_[x];
    }
    return x;
  }

  void unite(Vertex a, Vertex b) {
    Vertex ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
  }

  std::uint64_t size_of_root(Vertex r) const { return size_[r]; }

 private:
  std::vector<Vertex> parent_;
  std::vector<std::uint64_t> size_;
};

ComponentSummary summarize(UnionFind& uf, std::uint64_t n) {
  ComponentSummary out;
  out.labels.assign(n + 1, 0);
  constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
  std::vector<std::uint32_t> root_label(n + 1, kUnset);

  // First-appearance scan: label ids ascend with the smallest vertex of each
  // component, so the first maximal-size component seen is the
  // lexicographically first one (equal-size vertex lists compare by minimum).
  Vertex best_root = 0;
  std::uint64_t best_size = 0;
  for (Vertex v = 1; v <= n; ++v) {
    const Vertex r = uf.find(v);
    if (root_label[r] == kUnset) {
      root_label[r] = static_cast<std::uint32_t>(out.sizes.size());
      const std::uint64_t sz = uf.size_of_root(r);
      out.sizes.push_back(sz);
      if (sz > best_size) {
        best_size = sz;
        best_root = r;
      }
    }
    out.labels[v] = root_label[r];
  }
  out.largest_order = best_size;
  out.largest_vertices.reserve(best_size);
  for (Vertex v = 1; v <= n; ++v) {
    if (uf.find(v) == best_root) out.largest_vertices.push_back(v);
  }
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  return out;
}

}  // namespace

ComponentSummary components(const Hypergraph& h) {
  UnionFind uf(h.n() + 1);
  const auto& flat = h.flat();
  const int d = h.d();
  for (std::size_t i = 0; i < flat.size(); i += d) {
    for (int j = 1; j < d; ++j) uf.unite(flat[i], flat[i + j]);
  }
  return summarize(uf, h.n());
}

std::pair<std::uint64_t, std::vector<Vertex>> largest_component(const Hypergraph& h) {
  ComponentSummary s = components(h);
  return {s.largest_order, std::move(s.largest_vertices)};
}

ComponentSummary components_oracle(const Hypergraph& h) {
  const std::uint64_t n = h.n();

  // Vertex -> incident edge indices (CSR layout), then a search alternating
  // between vertices and edges. Deliberately shares no code with components().
  std::vector<std::uint32_t> degree(n + 1, 0);
  for (Vertex v : h.flat()) ++degree[v];
  std::vector<std::size_t> offset(n + 2, 0);
  for (std::uint64_t v = 1; v <= n; ++v) offset[v + 1] = offset[v] + degree[v];
  std::vector<std::uint32_t> incident(h.flat().size());
  {
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      for (Vertex v : h.edge(e)) incident[cursor[v]++] = static_cast<std::uint32_t>(e);
    }
  }

  ComponentSummary out;
  out.labels.assign(n + 1, 0);
  std::vector<char> vertex_seen(n + 1, 0);
  std::vector<char> edge_seen(h.edge_count(), 0);
  std::vector<Vertex> queue;

  Vertex best_first = 0;
  std::uint64_t best_size = 0;
  for (Vertex start = 1; start <= n; ++start) {
    if (vertex_seen[start]) continue;
    const auto label = static_cast<std::uint32_t>(out.sizes.size());
    std::uint64_t size = 0;
    queue.clear();
    queue.push_back(start);
    vertex_seen[start] = 1;
    while (!queue.empty()) {
      const Vertex v = queue.back();
      queue.pop_back();
      out.labels[v] = label;
      ++size;
      for (std::size_t k = offset[v]; k < offset[v + 1]; ++k) {
        const std::uint32_t e = incident[k];
        if (edge_seen[e]) continue;
        edge_seen[e] = 1;
        for (Vertex w : h.edge(e)) {
          if (!vertex_seen[w]) {
            vertex_seen[w] = 1;
            queue.push_back(w);
          }
        }
      }
    }
    out.sizes.push_back(size);
    if (size > best_size) {
      best_size = size;
      best_first = start;
    }
  }
  out.largest_order = best_size;
  const std::uint32_t best_label = out.labels[best_first];
  for (Vertex v = 1; v <= n; ++v) {
    if (out.labels[v] == best_label) out.largest_vertices.push_back(v);
  }
  // Re-number labels by first appearance to match components() exactly.
  {
    constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
    std::vector<std::uint32_t> remap(out.sizes.size(), kUnset);
    std::vector<std::uint64_t> sizes_by_new_label(out.sizes.size());
    std::uint32_t next = 0;
    for (Vertex v = 1; v <= n; ++v) {
      const std::uint32_t old = out.labels[v];
      if (remap[old] == kUnset) {
        remap[old] = next;
        sizes_by_new_label[next] = out.sizes[old];
        ++next;
      }
      out.labels[v] = remap[old];
    }
    out.sizes = std::move(sizes_by_new_label);
  }
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  return out;
}

namespace {

std::vector<Vertex> checked_set(std::uint64_t n, std::vector<Vertex> s) {
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 1 || s[i] > n) throw std::invalid_argument("EdgeFamily: vertex out of range");
    if (i > 0 && s[i] == s[i - 1]) throw std::invalid_argument("EdgeFamily: repeated vertex in set");
  }
  return s;
}

void check_disjoint(const std::vector<std::vector<Vertex>>& sets) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      // Sets are sorted; a linear merge detects overlap.
      auto a = sets[i].begin();
      auto b = sets[j].begin();
      while (a != sets[i].end() && b != sets[j].end()) {
        if (*a == *b) throw std::invalid_argument("EdgeFamily: sets must be disjoint");
        (*a < *b) ? ++a : ++b;
      }
    }
  }
}

}  // namespace

EdgeFamily::EdgeFamily(Kind kind, std::uint64_t n, int d,
                       std::vector<std::vector<Vertex>> sets)
    : kind_(kind), n_(n), d_(d), sets_(std::move(sets)) {
  if (d_ < 2) throw std::invalid_argument("EdgeFamily: d must be >= 2");
  if (n_ < static_cast<std::uint64_t>(d_)) throw std::invalid_argument("EdgeFamily: need n >= d");
}

EdgeFamily EdgeFamily::all(std::uint64_t n, int d) {
  return EdgeFamily(Kind::All, n, d, {});
}

EdgeFamily EdgeFamily::inside(std::uint64_t n, int d, std::vector<Vertex> s) {
  return EdgeFamily(Kind::Inside, n, d, {checked_set(n, std::move(s))});
}

EdgeFamily EdgeFamily::crossing(std::uint64_t n, int d, std::vector<Vertex> a,
                                std::vector<Vertex> b) {
  std::vector<std::vector<Vertex>> sets{checked_set(n, std::move(a)),
                                        checked_set(n, std::move(b))};
  check_disjoint(sets);
  return EdgeFamily(Kind::Crossing, n, d, std::move(sets));
}

EdgeFamily EdgeFamily::meeting_all(std::uint64_t n, int d,
                                   std::vector<std::vector<Vertex>> sets) {
  if (sets.empty() || sets.size() > 3) {
    throw std::invalid_argument("EdgeFamily: meeting_all takes 1..3 sets");
  }
  for (auto& s : sets) s = checked_set(n, std::move(s));
  check_disjoint(sets);
  return EdgeFamily(Kind::MeetingAll, n, d, std::move(sets));
}

BinomValue count_crossing_edges(std::uint64_t n, int d,
                                const std::vector<std::vector<Vertex>>& sets) {
  if (sets.empty() || sets.size() > 3) {
    throw std::invalid_argument("count_crossing_edges: need 1..3 sets");
  }
  {
    auto sorted = sets;
    for (auto& s : sorted) s = checked_set(n, std::move(s));
    check_disjoint(sorted);
  }
  // Inclusion/exclusion over which sets an edge is allowed to miss:
  // |E_d(V1..Vk)| = sum over T subseteq [k] of (-1)^|T| C(n - sum_{i in T}|Vi|, d).
  const std::size_t k = sets.size();
  unsigned __int128 pos = 0, neg = 0;
  double approx = 0.0;
  bool exact = true;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::uint64_t excluded = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) excluded += sets[i].size();
    }
    const std::uint64_t remaining = excluded > n ? 0 : n - excluded;
    const BinomValue term = binom(remaining, static_cast<std::uint64_t>(d));
    const bool negative = std::popcount(mask) % 2 == 1;
    approx += negative ? -term.approx : term.approx;
    if (!term.exact) {
      exact = false;
      continue;
    }
    auto& acc = negative ? neg : pos;
    if (acc > ~static_cast<unsigned __int128>(0) - term.value) {
      exact = false;
      continue;
    }
    acc += term.value;
  }
  BinomValue out;
  out.exact = exact;
  if (exact) {
    out.value = pos - neg;  // counts are nonnegative: pos >= neg
    const auto hi = static_cast<std::uint64_t>(out.value >> 64);
    const auto lo = static_cast<std::uint64_t>(out.value);
    out.approx = static_cast<double>(hi) * 0x1.0p64 + static_cast<double>(lo);
  } else {
    out.approx = std::max(approx, 0.0);
  }
  out.log_value = out.approx > 0 ? std::log(out.approx)
                                 : -std::numeric_limits<double>::infinity();
  return out;
}

BinomValue EdgeFamily::cardinality() const {
  switch (kind_) {
    case Kind::All:
      return binom(n_, static_cast<std::uint64_t>(d_));
    case Kind::Inside:
      return binom(sets_[0].size(), static_cast<std::uint64_t>(d_));
    case Kind::Crossing:
    case Kind::MeetingAll:
      return count_crossing_edges(n_, d_, sets_);
  }
  throw std::logic_error("EdgeFamily: unreachable kind");
}

bool EdgeFamily::contains(std::span<const Vertex> edge) const {
  auto meets = [&](const std::vector<Vertex>& s) {
    for (Vertex v : edge) {
      if (std::binary_search(s.begin(), s.end(), v)) return true;
    }
    return false;
  };
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::Inside:
      for (Vertex v : edge) {
        if (!std::binary_search(sets_[0].begin(), sets_[0].end(), v)) return false;
      }
      return true;
    case Kind::Crossing:
    case Kind::MeetingAll:
      for (const auto& s : sets_) {
        if (!meets(s)) return false;
      }
      return true;
  }
  throw std::logic_error("EdgeFamily: unreachable kind");
}

EdgeKeySet::EdgeKeySet(std::uint64_t n, int d, std::size_t expected) {
  bits_per_vertex_ = std::bit_width(n);
  packed_ = bits_per_vertex_ * d <= 128;
  if (packed_) {
    packed_set_.reserve(expected);
  } else {
    vec_set_.reserve(expected);
  }
}

unsigned __int128 EdgeKeySet::pack(std::span<const Vertex> edge) const {
  unsigned __int128 key = 0;
  for (Vertex v : edge) key = (key << bits_per_vertex_) | v;
  return key;
}

bool EdgeKeySet::insert(std::span<const Vertex> edge) {
  if (packed_) return packed_set_.insert(pack(edge)).second;
  return vec_set_.emplace(edge.begin(), edge.end()).second;
}

bool EdgeKeySet::contains(std::span<const Vertex> edge) const {
  if (packed_) return packed_set_.contains(pack(edge));
  return vec_set_.contains(std::vector<Vertex>(edge.begin(), edge.end()));
}

std::size_t EdgeKeySet::size() const {
  return packed_ ? packed_set_.size() : vec_set_.size();
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& why) {
  throw ParseError("hg parse error at line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

Hypergraph read_hg(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_fail(1, "missing header");
  std::istringstream header(line);
  std::string magic;
  long long d = 0, n = 0, m = 0;
  if (!(header >> magic >> d >> n >> m) || magic != "HG") {
    parse_fail(1, "expected 'HG <d> <n> <m>'");
  }
  std::string trailing;
  if (header >> trailing) parse_fail(1, "trailing tokens in header");
  if (d < 2 || n < d || m < 0) parse_fail(1, "invalid header values");

  std::vector<Vertex> flat;
  flat.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(d));
  EdgeKeySet seen(static_cast<std::uint64_t>(n), static_cast<int>(d),
                  static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) parse_fail(line_no, "unexpected end of file");
    std::istringstream row(line);
    std::vector<Vertex> edge(static_cast<std::size_t>(d));
    for (long long j = 0; j < d; ++j) {
      long long v = 0;
      if (!(row >> v)) parse_fail(line_no, "expected " + std::to_string(d) + " vertex ids");
      if (v < 1 || v > n) parse_fail(line_no, "vertex id out of range");
      if (j > 0 && v <= static_cast<long long>(edge[static_cast<std::size_t>(j - 1)])) {
        parse_fail(line_no, "vertex ids must be strictly ascending");
      }
      edge[static_cast<std::size_t>(j)] = static_cast<Vertex>(v);
    }
    if (row >> trailing) parse_fail(line_no, "trailing tokens");
    if (!seen.insert(edge)) parse_fail(line_no, "duplicate edge");
    flat.insert(flat.end(), edge.begin(), edge.end());
  }
  while (std::getline(in, line)) {
    if (!line.empty()) parse_fail(static_cast<std::size_t>(m) + 2, "content after last edge");
  }
  return Hypergraph::trusted(static_cast<int>(d), static_cast<std::uint64_t>(n),
                             std::move(flat));
}

Hypergraph read_hg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_hg(in);
}

void write_hg(const Hypergraph& h, std::ostream& out) {
  const int d = h.d();
  std::vector<std::uint32_t> order(h.edge_count());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto ea = h.edge(a), eb = h.edge(b);
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
  });
  out << "HG " << d << ' ' << h.n() << ' ' << h.edge_count() << '\n';
  for (std::uint32_t i : order) {
    const auto e = h.edge(i);
    for (int j = 0; j < d; ++j) {
      if (j) out << ' ';
      out << e[static_cast<std::size_t>(j)];
    }
    out << '\n';
  }
}

void write_hg_file(const Hypergraph& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_hg(h, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hgsim
