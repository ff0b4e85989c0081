#pragma once

#include <complex>
#include <vector>

#include "eitlab/exact_pmf.hpp"
#include "eitlab/spin_params.hpp"

namespace eitlab::spin_tree {

// Exact distribution of the level-`level` spin sum, built by folding one
// level at a time: each step convolves `copy` plain copies with `fresh`
// sign-symmetrized copies of the previous level.
ExactPmf exact_pmf(const SpinParams& params, int level, const PmfOptions& opt = {});

// all levels 0..level_max in one pass (cheaper than repeated exact_pmf calls)
std::vector<ExactPmf> pmf_ladder(const SpinParams& params, int level_max,
                                 const PmfOptions& opt = {});

// |E exp(i*lambda*Y_level)| via the closed product over tree generations,
// evaluated in log space; underflow reports an exact 0
double charfn_abs(const SpinParams& params, int level, double lambda);

// constant C such that max_x P[level sum = x] <= C * copy^(-level) for all
// levels; series summed with a certified geometric tail, so the returned
// value is an upper bound of the true constant
double concentration_constant(const SpinParams& params);

struct ConcentrationRow {
  int level = 0;
  double max_mass = 0.0;
  double ratio = 0.0;  // max_mass * copy^level
  bool ok = false;
};

struct ConcentrationReport {
  double constant = 0.0;
  std::vector<ConcentrationRow> rows;
  bool all_within = false;
};

// sweep levels 0..level_max and compare each max-mass ratio against the constant
ConcentrationReport verify_concentration(const SpinParams& params, int level_max,
                                         const PmfOptions& opt = {});

// characteristic function of the scaled limit of copy^(-level) * level sum;
// degenerate (identically 0 off the origin) when copy^2 <= branching
std::complex<double> limit_charfn(const SpinParams& params, double s);

// true when copy^2 > branching, i.e. the scaled limit is a proper law
bool limit_regime_normal(const SpinParams& params);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;         // NaN when variance is 0
  double excess_kurtosis = 0.0;  // NaN when variance is 0
};

Moments normalized_moments(const SpinParams& params, int level, const PmfOptions& opt = {});

}  // namespace eitlab::spin_tree
