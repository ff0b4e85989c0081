#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace eitlab {

// Branching parameters of the spin tree: each vertex has b = copy + fresh
// children; the first `copy` children inherit the parent sign, the remaining
// `fresh` children draw independent fair signs.
struct SpinParams {
  int copy = 3;   // children that repeat the parent spin (>= 2)
  int fresh = 1;  // children with independent uniform spins (>= 1)

  int branching() const noexcept { return copy + fresh; }

  // decay exponent log(copy)/log(branching), in (0,1)
  double alpha() const noexcept {
    return std::log(static_cast<double>(copy)) / std::log(static_cast<double>(branching()));
  }

  void validate() const {
    if (copy < 2) throw std::invalid_argument("spin params: copy must be >= 2, got " + std::to_string(copy));
    if (fresh < 1) throw std::invalid_argument("spin params: fresh must be >= 1, got " + std::to_string(fresh));
  }

  bool operator==(const SpinParams&) const = default;
};

}  // namespace eitlab
