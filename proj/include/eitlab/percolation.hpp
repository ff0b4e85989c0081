#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "eitlab/eit_paths.hpp"

namespace eitlab::perc {

enum class PercMode { bond, site };

// finite box: oriented configs live on {x : x_i >= 0, sum x_i <= extent},
// ordinary ones on the L-infinity ball of radius extent
struct PercConfig {
  int dimension = 2;
  int extent = 0;
  double p = 0.5;
  bool oriented = true;
  PercMode mode = PercMode::bond;
  std::uint64_t seed = 0;
  // bond: bit vertex_rank*d + axis (defined when the head stays in the box);
  // site: bit vertex_rank; ranks are lexicographic over coordinates
  std::vector<std::uint64_t> open_bits;

  bool bit(std::size_t i) const { return (open_bits[i >> 6] >> (i & 63)) & 1; }
  void set_bit(std::size_t i, bool v) {
    const std::uint64_t m = 1ull << (i & 63);
    if (v)
      open_bits[i >> 6] |= m;
    else
      open_bits[i >> 6] &= ~m;
  }
};

// number of vertices of the box
std::uint64_t box_vertex_count(int dimension, int extent, bool oriented);

bool in_box(const PercConfig& cfg, const std::vector<int>& x);

// lexicographic rank of a box vertex; pre: in_box
std::uint64_t vertex_rank(const PercConfig& cfg, const std::vector<int>& x);

// uniform draw attached to the physical edge (x, x+e_axis) or site x: nested
// boxes and different retention levels see the same underlying randomness
double edge_uniform(std::uint64_t seed, const std::vector<int>& x, int axis);
double site_uniform(std::uint64_t seed, const std::vector<int>& x);

struct PercOptions {
  std::uint64_t max_vertices = 4'000'000;
};

PercConfig sample_config(int dimension, int extent, double p, bool oriented,
                         PercMode mode, std::uint64_t seed,
                         const PercOptions& opt = {});

struct ClusterGraph {
  int dimension = 0;
  std::vector<std::vector<int>> vertices;        // coordinates, source first
  std::vector<std::pair<int, int>> edges;        // open edges inside the cluster
  std::vector<int> dist;                         // traversal distance from the source
  bool truncated = false;                        // touched the box boundary
};

// all vertices reachable from v0 through open edges (directed forward when the
// config is oriented); site mode walks across open sites instead
ClusterGraph oriented_cluster(const PercConfig& cfg, const std::vector<int>& v0);

void write_config(const PercConfig& cfg, std::ostream& out);
PercConfig read_config(std::istream& in);

struct SurvivalReport {
  std::size_t trials = 0;
  std::size_t positive = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double se = 0.0;
  bool pass = false;
};

// checks the openness lower bound P[Z_N > 0] >= (1 - theta/p)/C against
// sampled configs; needs p > theta (implemented with the flow machinery)
SurvivalReport survival_lower_bound_check(const paths::PathMeasureSpec& spec, double p,
                                          double theta, double c, int n,
                                          std::size_t trials);

}  // namespace eitlab::perc
