#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "eitlab/spin_params.hpp"

namespace eitlab::paths {

enum class MeasureKind { uniform, z3_unpredictable };

struct PathMeasureSpec {
  MeasureKind kind = MeasureKind::z3_unpredictable;
  int dimension = 3;  // uniform kind: any d >= 2; z3 kind: always 3
  SpinParams params{};
  std::uint64_t seed = 0;

  void validate() const;
};

// oriented unit-speed lattice path from the origin; increments are indices of
// standard basis vectors
struct LatticePath {
  int dimension = 0;
  std::vector<std::uint8_t> increments;

  std::size_t length() const { return increments.size(); }
};

LatticePath sample_oriented(const PathMeasureSpec& spec, std::size_t length);

// two independent paths from domain-separated sub-seeds of the same spec
std::pair<LatticePath, LatticePath> sample_pair(const PathMeasureSpec& spec,
                                                std::size_t length,
                                                std::uint64_t pair_index);

// number of indices n in [0, min length] where the position vectors coincide
long long collision_count(const LatticePath& a, const LatticePath& b);

// number of lattice edges the two paths have in common (any index)
long long shared_edge_count(const LatticePath& a, const LatticePath& b);

struct FitRange {
  long long lo = 0, hi = 0;
};

struct TailFit {
  std::vector<std::uint64_t> counts;  // counts[c] = pairs with collision count c
  std::size_t pairs = 0;

  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  double c_hat = std::numeric_limits<double>::quiet_NaN();
  double theta_lo = std::numeric_limits<double>::quiet_NaN();  // 95% CI
  double theta_hi = std::numeric_limits<double>::quiet_NaN();
  // constant that majorizes the whole empirical curve: survival(c) <=
  // c_major * theta_hat^c for every observed c (not just the fit window)
  double c_major = std::numeric_limits<double>::quiet_NaN();

  FitRange fit_range;
  int fit_points = 0;
  bool degenerate = false;      // fewer than 3 usable survival points
  bool truncated = false;       // curve never fell through the fit floor
  // a genuinely geometric tail fits the same slope at every scale; a
  // recurrent control keeps flattening as paths lengthen, so the flag
  // combines window curvature with theta drift against a quarter-length refit
  bool nonexponential = false;
  double slope_first = std::numeric_limits<double>::quiet_NaN();
  double slope_second = std::numeric_limits<double>::quiet_NaN();
  double theta_short = std::numeric_limits<double>::quiet_NaN();  // quarter-length theta_hat
  double theta_drift = std::numeric_limits<double>::quiet_NaN();  // theta_hat - theta_short

  double survival(long long c) const;
};

// default fit window: survival between 1e-3 and 1e-1
TailFit tail_fit(const PathMeasureSpec& spec, std::size_t length, std::size_t pairs,
                 double fit_floor = 1e-3, double fit_ceiling = 1e-1);

struct ReturnEstimate {
  double estimate = 0.0;  // truncation makes this an underestimate
  double lo = 0.0, hi = 0.0;
  std::size_t walks = 0;
  long long horizon = 0;
};

// return probability of the lazy difference walk (increments e_i - e_j with
// i, j independent uniform); d <= 3 rejected as recurrent
ReturnEstimate theta_d_estimate(int d, std::uint64_t seed, std::size_t walks,
                                long long horizon);

struct EitConstants {
  long long m = 0;
  double beta = 0.0;
  double theta = 0.0;
  double c = 0.0;
  bool degenerate_perfect = false;  // identically-zero bound
};

// smallest m with sum_k bound(k*m) < 1 (certified with a dyadic tail bound),
// then theta = beta^(1/m), c = m/beta; bound must be nonincreasing
EitConstants eit_constants_from_profile(const std::function<double(long long)>& bound);

// profile bound for collision counts of two independent z3 paths:
// min(1, c_alpha^2 * floor(k/2)^(-2 alpha))
std::function<double(long long)> z3_profile_bound(const SpinParams& params);

}  // namespace eitlab::paths
