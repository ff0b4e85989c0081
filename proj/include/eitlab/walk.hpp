#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "eitlab/spin_params.hpp"

namespace eitlab::walk {

// path of child indices from the root; digit values in [0, branching),
// values below `copy` are copy-children, the rest draw fresh spins
struct VertexAddress {
  std::vector<std::uint8_t> digits;
};

struct WalkPath {
  long long start = 0;
  std::vector<signed char> steps;  // each +1 or -1

  std::vector<long long> values() const {
    std::vector<long long> v(steps.size() + 1);
    v[0] = start;
    for (std::size_t i = 0; i < steps.size(); ++i) v[i + 1] = v[i] + steps[i];
    return v;
  }
};

// Spin of the leaf with 0-based left-to-right index `index` on the leaf line.
// Walks up the ancestor chain to the nearest fresh-spinned ancestor; the
// result does not depend on how deep a tree the enumeration is embedded in,
// so random access, streaming, and level consistency all coincide.
// (height, index) of the nearest independently-drawn ancestor of a leaf, or
// nothing for the copy chain hanging off the root
std::optional<std::pair<std::uint64_t, std::uint64_t>> fresh_ancestor(
    const SpinParams& params, std::uint64_t index);

int spin_at_index(const SpinParams& params, std::uint64_t seed, std::uint64_t index);

// same spin through the address interface (digits from the root)
int spin_at(const SpinParams& params, std::uint64_t seed, const VertexAddress& v);

// plain process: S_0 = 0, increments are the leaf spins in enumeration order
WalkPath sample_path(const SpinParams& params, std::uint64_t seed, std::size_t n);

// simple random walk baseline with i.i.d. fair steps
WalkPath sample_srw(std::uint64_t seed, std::size_t n);

// stationary version: the leaf window floats at a random b-adic offset whose
// digits are drawn lazily, which realizes the re-rooted construction
WalkPath sample_stationary(const SpinParams& params, std::uint64_t seed, std::size_t n);

// W_m = (m + S_m)/2; requires start = 0; increments in {0,1}
std::vector<long long> half_coordinate(const WalkPath& path);

enum class ProfileKind { exact_conditional, unconditional_mc };

struct ProfileEstimate {
  long long k = 0;
  ProfileKind bound_kind = ProfileKind::unconditional_mc;
  double value = 0.0;
  double ci_halfwidth = 0.0;  // 0 for exact results
  double bound = 0.0;         // profile bound at this lag
  bool flagged = false;       // lower confidence bound above `bound`
};

// profile bound (2b)^alpha * C * k^-alpha with C the concentration constant
double profile_bound(const SpinParams& params, long long k);

// Exact worst-case prediction probability: enumerate every spin configuration
// of the depth-`level` tree, group by the history S_0..S_n, and take the max
// over histories and targets of P[S_{n+k} = target | history].
ProfileEstimate exact_conditional_profile(const SpinParams& params, int level, int n, int k);

// Monte Carlo concentration max_x P[S_k = x], Wilson interval, flag when the
// interval's lower end exceeds the profile bound
std::vector<ProfileEstimate> unconditional_concentration(const SpinParams& params,
                                                         std::uint64_t seed,
                                                         const std::vector<long long>& ks,
                                                         std::size_t samples);

// same estimator for the simple-walk baseline; bound/flag stay unset
std::vector<ProfileEstimate> srw_concentration(std::uint64_t seed,
                                               const std::vector<long long>& ks,
                                               std::size_t samples);

}  // namespace eitlab::walk
