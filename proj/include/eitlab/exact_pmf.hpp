#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace eitlab::spin_tree {

enum class PmfMode { rational, extended_float };

struct PmfOptions {
  // hard cap on support points of any intermediate or final pmf
  std::size_t support_budget = 10'000'000;
  // stay in exact dyadic rationals while the predicted support fits;
  // beyond this the fold switches to 80-bit floats
  std::size_t rational_max_support = 20'000;
};

// Distribution of a level sum on the lattice {offset, offset+2, ...}.
// All support points share one parity, so masses sit on a step-2 grid.
// rational mode: mass_i = num[i] / 2^denom_log2, exact.
// extended_float mode: mass[i] as long double (64-bit mantissa).
struct ExactPmf {
  int level = 0;
  long long offset = 0;
  PmfMode mode = PmfMode::rational;
  unsigned long denom_log2 = 0;
  std::vector<mpz_class> num;
  std::vector<long double> mass;

  std::size_t points() const {
    return mode == PmfMode::rational ? num.size() : mass.size();
  }
  long long x_at(std::size_t i) const { return offset + 2 * static_cast<long long>(i); }
  long long x_max() const { return x_at(points() - 1); }

  long double mass_ld(std::size_t i) const;
  // mass at an arbitrary integer point; zero off-grid
  double mass_at(long long x) const;
  long double max_mass() const;
  long double total_mass() const;
  long double mean_ld() const;
};

// distribution of -X
ExactPmf mirror(const ExactPmf& p);
// distribution of eps*X with an independent fair sign eps
ExactPmf symmetrize(const ExactPmf& p, const PmfOptions& opt);
// sum of independent X + Y; throws budget_error if the result exceeds the budget
ExactPmf convolve(const ExactPmf& x, const ExactPmf& y, const PmfOptions& opt);
// sum of k independent copies, by repeated squaring
ExactPmf convolve_power(const ExactPmf& p, int k, const PmfOptions& opt);

ExactPmf to_extended_float(const ExactPmf& p);

// raw engines, exposed for direct testing
std::vector<mpz_class> convolve_exact(const std::vector<mpz_class>& a,
                                      const std::vector<mpz_class>& b);
std::vector<long double> convolve_float(const std::vector<long double>& a,
                                        const std::vector<long double>& b);

// num / 2^exp2 as a long double (top 64 mantissa bits)
long double dyadic_to_ld(const mpz_class& num, long exp2);

}  // namespace eitlab::spin_tree
