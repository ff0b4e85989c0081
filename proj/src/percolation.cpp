#include "eitlab/percolation.hpp"

#include <cstring>
#include <deque>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "eitlab/errors.hpp"
#include "eitlab/rng.hpp"

namespace eitlab::perc {

namespace {

constexpr std::uint64_t kCountCap = 1ull << 50;  // anything above is over budget anyway

std::uint64_t zigzag(int v) {
  const auto u = static_cast<std::uint32_t>(v);
  return (u << 1) ^ static_cast<std::uint32_t>(v >> 31);
}

// C(n+k, k) = number of nonnegative k-tuples with sum <= n, computed stepwise
// so every intermediate value is itself a binomial
std::uint64_t simplex_count(long long n, int k) {
  if (n < 0) return 0;
  std::uint64_t c = 1;
  for (long long t = 1; t <= k; ++t) {
    if (c > kCountCap) return kCountCap;
    c = c * static_cast<std::uint64_t>(n + t) / static_cast<std::uint64_t>(t);
  }
  return c;
}

void validate_shape(int dimension, int extent) {
  if (dimension < 1 || dimension > 16)
    throw std::invalid_argument("percolation: dimension must be in [1,16]");
  if (extent < 0) throw std::invalid_argument("percolation: extent must be >= 0");
}

// lexicographic successor within the box; false when exhausted
bool advance_vertex(const PercConfig& cfg, std::vector<int>& x) {
  const int d = cfg.dimension;
  if (cfg.oriented) {
    long long total = 0;
    for (const int c : x) total += c;
    for (int i = d - 1; i >= 0; --i) {
      long long suffix = 0;
      for (int j = i + 1; j < d; ++j) suffix += x[j];
      if (total - suffix + 1 <= cfg.extent) {
        ++x[i];
        for (int j = i + 1; j < d; ++j) x[j] = 0;
        return true;
      }
    }
    return false;
  }
  for (int i = d - 1; i >= 0; --i) {
    if (x[i] < cfg.extent) {
      ++x[i];
      for (int j = i + 1; j < d; ++j) x[j] = -cfg.extent;
      return true;
    }
  }
  return false;
}

std::vector<int> first_vertex(const PercConfig& cfg) {
  return std::vector<int>(static_cast<std::size_t>(cfg.dimension),
                          cfg.oriented ? 0 : -cfg.extent);
}

}  // namespace

std::uint64_t box_vertex_count(int dimension, int extent, bool oriented) {
  validate_shape(dimension, extent);
  if (oriented) return simplex_count(extent, dimension);
  std::uint64_t c = 1;
  const auto side = static_cast<std::uint64_t>(2 * extent + 1);
  for (int i = 0; i < dimension; ++i) {
    if (c > kCountCap / side) return kCountCap;
    c *= side;
  }
  return c;
}

bool in_box(const PercConfig& cfg, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != cfg.dimension) return false;
  if (cfg.oriented) {
    long long total = 0;
    for (const int c : x) {
      if (c < 0) return false;
      total += c;
    }
    return total <= cfg.extent;
  }
  for (const int c : x)
    if (c < -cfg.extent || c > cfg.extent) return false;
  return true;
}

std::uint64_t vertex_rank(const PercConfig& cfg, const std::vector<int>& x) {
  const int d = cfg.dimension;
  if (cfg.oriented) {
    // count lexicographic predecessors: fix a prefix, run the next coordinate
    // below its value, leave the suffix free; the inner sum telescopes
    std::uint64_t rank = 0;
    long long prefix = 0;
    for (int i = 0; i < d; ++i) {
      const long long rem = cfg.extent - prefix;
      rank += simplex_count(rem, d - i) - simplex_count(rem - x[i], d - i);
      prefix += x[i];
    }
    return rank;
  }
  std::uint64_t rank = 0;
  const auto side = static_cast<std::uint64_t>(2 * cfg.extent + 1);
  for (int i = 0; i < d; ++i)
    rank = rank * side + static_cast<std::uint64_t>(x[i] + cfg.extent);
  return rank;
}

double edge_uniform(std::uint64_t seed, const std::vector<int>& x, int axis) {
  std::uint64_t h = rng::absorb(seed, rng::tag::kEdge);
  for (const int c : x) h = rng::absorb(h, zigzag(c));
  h = rng::absorb(h, static_cast<std::uint64_t>(axis));
  return rng::u01(rng::absorb(h, 0));
}

double site_uniform(std::uint64_t seed, const std::vector<int>& x) {
  std::uint64_t h = rng::absorb(seed, rng::tag::kSite);
  for (const int c : x) h = rng::absorb(h, zigzag(c));
  return rng::u01(rng::absorb(h, 0));
}

PercConfig sample_config(int dimension, int extent, double p, bool oriented,
                         PercMode mode, std::uint64_t seed, const PercOptions& opt) {
  validate_shape(dimension, extent);
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("percolation: p must lie strictly inside (0,1)");

  PercConfig cfg;
  cfg.dimension = dimension;
  cfg.extent = extent;
  cfg.p = p;
  cfg.oriented = oriented;
  cfg.mode = mode;
  cfg.seed = seed;

  const std::uint64_t nv = box_vertex_count(dimension, extent, oriented);
  if (nv > opt.max_vertices)
    throw budget_error("percolation: box has " + std::to_string(nv) +
                       " vertices, budget " + std::to_string(opt.max_vertices));
  const std::uint64_t nbits =
      mode == PercMode::bond ? nv * static_cast<std::uint64_t>(dimension) : nv;
  cfg.open_bits.assign((nbits + 63) / 64, 0);

  std::vector<int> x = first_vertex(cfg);
  std::vector<int> head(static_cast<std::size_t>(dimension));
  std::uint64_t rank = 0;
  do {
    if (mode == PercMode::site) {
      if (site_uniform(seed, x) < p) cfg.set_bit(rank, true);
    } else {
      for (int axis = 0; axis < dimension; ++axis) {
        head = x;
        ++head[axis];
        if (!in_box(cfg, head)) continue;
        if (edge_uniform(seed, x, axis) < p)
          cfg.set_bit(rank * static_cast<std::uint64_t>(dimension) +
                          static_cast<std::uint64_t>(axis),
                      true);
      }
    }
    ++rank;
  } while (advance_vertex(cfg, x));
  return cfg;
}

namespace {

bool at_boundary(const PercConfig& cfg, const std::vector<int>& x) {
  if (cfg.oriented) {
    long long total = 0;
    for (const int c : x) total += c;
    return total == cfg.extent;
  }
  for (const int c : x)
    if (c == -cfg.extent || c == cfg.extent) return true;
  return false;
}

// is the step from cluster member x (rank rx) across (x, x+e_axis) or
// (x-e_axis, x) traversable?  forward = true means the +e_axis direction
bool step_open(const PercConfig& cfg, std::uint64_t rx, const std::vector<int>& x,
               int axis, bool forward, std::vector<int>& scratch) {
  const auto d = static_cast<std::uint64_t>(cfg.dimension);
  scratch = x;
  if (forward) {
    ++scratch[axis];
    if (!in_box(cfg, scratch)) return false;
    if (cfg.mode == PercMode::site) return cfg.bit(vertex_rank(cfg, scratch));
    return cfg.bit(rx * d + static_cast<std::uint64_t>(axis));
  }
  --scratch[axis];
  if (!in_box(cfg, scratch)) return false;
  if (cfg.mode == PercMode::site) return cfg.bit(vertex_rank(cfg, scratch));
  return cfg.bit(vertex_rank(cfg, scratch) * d + static_cast<std::uint64_t>(axis));
}

}  // namespace

ClusterGraph oriented_cluster(const PercConfig& cfg, const std::vector<int>& v0) {
  if (!in_box(cfg, v0))
    throw std::invalid_argument("oriented_cluster: source outside the box");

  ClusterGraph g;
  g.dimension = cfg.dimension;
  std::unordered_map<std::uint64_t, int> index;  // vertex rank -> cluster index

  g.vertices.push_back(v0);
  g.dist.push_back(0);
  g.truncated = at_boundary(cfg, v0);
  index.emplace(vertex_rank(cfg, v0), 0);

  // a closed source site has no cluster to speak of
  if (cfg.mode == PercMode::site && !cfg.bit(vertex_rank(cfg, v0))) return g;

  std::vector<int> scratch(v0.size());
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    const std::vector<int> x = g.vertices[static_cast<std::size_t>(cur)];
    const std::uint64_t rx = vertex_rank(cfg, x);
    const int ndirs = cfg.oriented ? 1 : 2;
    for (int axis = 0; axis < cfg.dimension; ++axis) {
      for (int dir = 0; dir < ndirs; ++dir) {
        if (!step_open(cfg, rx, x, axis, dir == 0, scratch)) continue;
        const std::uint64_t ry = vertex_rank(cfg, scratch);
        if (index.count(ry)) continue;
        const int id = static_cast<int>(g.vertices.size());
        index.emplace(ry, id);
        g.vertices.push_back(scratch);
        g.dist.push_back(g.dist[static_cast<std::size_t>(cur)] + 1);
        if (at_boundary(cfg, scratch)) g.truncated = true;
        queue.push_back(id);
      }
    }
  }

  // open edges with both ends inside the cluster, each recorded once at its
  // lower endpoint
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const auto& x = g.vertices[i];
    const std::uint64_t rx = vertex_rank(cfg, x);
    for (int axis = 0; axis < cfg.dimension; ++axis) {
      if (!step_open(cfg, rx, x, axis, true, scratch)) continue;
      const auto it = index.find(vertex_rank(cfg, scratch));
      if (it != index.end())
        g.edges.emplace_back(static_cast<int>(i), it->second);
    }
  }
  return g;
}

namespace {

constexpr char kMagic[8] = {'e', 'i', 't', 'l', 'p', 'e', 'r', 'c'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::invalid_argument("percolation config: truncated stream");
  return v;
}

}  // namespace

void write_config(const PercConfig& cfg, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put(out, kFormatVersion);
  put(out, static_cast<std::int32_t>(cfg.dimension));
  put(out, static_cast<std::int32_t>(cfg.extent));
  put(out, cfg.p);
  put(out, static_cast<std::uint8_t>(cfg.oriented ? 1 : 0));
  put(out, static_cast<std::uint8_t>(cfg.mode == PercMode::site ? 1 : 0));
  put(out, cfg.seed);
  put(out, static_cast<std::uint64_t>(cfg.open_bits.size()));
  for (const auto w : cfg.open_bits) put(out, w);
}

PercConfig read_config(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::invalid_argument("percolation config: bad magic");
  if (get<std::uint32_t>(in) != kFormatVersion)
    throw std::invalid_argument("percolation config: unsupported version");

  PercConfig cfg;
  cfg.dimension = get<std::int32_t>(in);
  cfg.extent = get<std::int32_t>(in);
  cfg.p = get<double>(in);
  cfg.oriented = get<std::uint8_t>(in) != 0;
  cfg.mode = get<std::uint8_t>(in) != 0 ? PercMode::site : PercMode::bond;
  cfg.seed = get<std::uint64_t>(in);
  validate_shape(cfg.dimension, cfg.extent);
  if (!(cfg.p > 0.0 && cfg.p < 1.0))
    throw std::invalid_argument("percolation config: bad retention probability");

  const std::uint64_t nv = box_vertex_count(cfg.dimension, cfg.extent, cfg.oriented);
  const std::uint64_t nbits =
      cfg.mode == PercMode::bond ? nv * static_cast<std::uint64_t>(cfg.dimension) : nv;
  const auto words = get<std::uint64_t>(in);
  if (words != (nbits + 63) / 64)
    throw std::invalid_argument("percolation config: bit count does not match the box");
  cfg.open_bits.resize(words);
  for (auto& w : cfg.open_bits) w = get<std::uint64_t>(in);
  return cfg;
}

}  // namespace eitlab::perc
