#include "eitlab/spin_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eitlab/errors.hpp"

namespace eitlab::spin_tree {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

}  // namespace

std::vector<ExactPmf> pmf_ladder(const SpinParams& params, int level_max,
                                 const PmfOptions& opt) {
  params.validate();
  if (level_max < 0) throw std::invalid_argument("pmf_ladder: level must be >= 0");

  ExactPmf cur;
  cur.level = 0;
  cur.offset = 1;
  cur.num = {mpz_class(1)};

  std::vector<ExactPmf> ladder;
  ladder.reserve(static_cast<std::size_t>(level_max) + 1);
  ladder.push_back(cur);

  for (int lev = 1; lev <= level_max; ++lev) {
    // predict the support of the next level before doing any work
    const std::size_t len = cur.points();
    const long long hi = std::max(cur.x_max(), -cur.offset);
    const long long lo = std::min(cur.offset, -cur.x_max());
    const std::size_t sym_len = static_cast<std::size_t>((hi - lo) / 2) + 1;
    const std::size_t copies_len = static_cast<std::size_t>(params.copy) * (len - 1) + 1;
    const std::size_t fresh_len = static_cast<std::size_t>(params.fresh) * (sym_len - 1) + 1;
    const std::size_t next_len = copies_len + fresh_len - 1;

    if (next_len > opt.support_budget)
      throw budget_error("pmf level " + std::to_string(lev) + " needs " +
                         std::to_string(next_len) + " support points, budget is " +
                         std::to_string(opt.support_budget));
    if (cur.mode == PmfMode::rational && next_len > opt.rational_max_support)
      cur = to_extended_float(cur);

    ExactPmf copies = convolve_power(cur, params.copy, opt);
    ExactPmf fresh = convolve_power(symmetrize(cur, opt), params.fresh, opt);
    cur = convolve(copies, fresh, opt);
    cur.level = lev;
    ladder.push_back(cur);
  }
  return ladder;
}

ExactPmf exact_pmf(const SpinParams& params, int level, const PmfOptions& opt) {
  return pmf_ladder(params, level, opt).back();
}

double charfn_abs(const SpinParams& params, int level, double lambda) {
  params.validate();
  if (level < 0) throw std::invalid_argument("charfn_abs: level must be >= 0");
  if (level == 0) return 1.0;
  // phases are copy^(level-k) * lambda; demand the integer power stay exactly
  // representable so argument reduction is trustworthy
  if (static_cast<double>(level - 1) * std::log2(static_cast<double>(params.copy)) > 62.0)
    throw budget_error("charfn_abs: level too deep for exact phase evaluation");

  const long double b = params.branching();
  long double phase_scale = 1.0L;  // copy^(level-k)
  for (int i = 0; i < level - 1; ++i) phase_scale *= params.copy;

  long double logsum = 0.0L;
  long double weight = params.fresh;  // fresh * branching^(k-1)
  for (int k = 1; k <= level; ++k) {
    const long double c = std::fabs(std::cos(phase_scale * static_cast<long double>(lambda)));
    if (c == 0.0L) return 0.0;
    logsum += weight * std::log(c);
    phase_scale /= params.copy;
    weight *= b;
  }
  if (logsum < -11400.0L) return 0.0;  // below extended-float exp range
  return static_cast<double>(std::exp(logsum));
}

double concentration_constant(const SpinParams& params) {
  params.validate();
  const long double ell = params.copy;
  const long double b = params.branching();
  const long double r = params.fresh;
  const long double log_xi = std::log(std::cos(kPi / (2.0L * ell)));
  const long double log_ell = std::log(ell);

  long double sum = 0.0L;
  for (int k = 1; k <= 200000; ++k) {
    const long double bk = std::pow(b, static_cast<long double>(k - 1));
    const long double term = std::exp(k * log_ell + r * bk * log_xi);
    sum += term;
    // ratio of consecutive terms is decreasing; once it drops below 1/2 the
    // remainder is dominated by a geometric series we can add outright
    const long double log_q = log_ell + r * bk * (b - 1.0L) * log_xi;
    if (log_q < std::log(0.5L)) {
      const long double q = std::exp(log_q);
      const long double tail = term * q / (1.0L - q);
      if (tail < 1e-18L * (1.0L + sum)) {
        sum += tail;
        break;
      }
    }
  }
  return static_cast<double>(2.0L * kPi * (1.0L + sum));
}

ConcentrationReport verify_concentration(const SpinParams& params, int level_max,
                                         const PmfOptions& opt) {
  ConcentrationReport rep;
  rep.constant = concentration_constant(params);
  const auto ladder = pmf_ladder(params, level_max, opt);
  rep.all_within = true;
  long double ell_pow = 1.0L;
  for (int lev = 0; lev <= level_max; ++lev) {
    ConcentrationRow row;
    row.level = lev;
    const long double mm = ladder[static_cast<std::size_t>(lev)].max_mass();
    row.max_mass = static_cast<double>(mm);
    row.ratio = static_cast<double>(mm * ell_pow);
    row.ok = row.ratio <= rep.constant * (1.0 + 1e-12);
    rep.all_within = rep.all_within && row.ok;
    rep.rows.push_back(row);
    ell_pow *= params.copy;
  }
  return rep;
}

bool limit_regime_normal(const SpinParams& params) {
  return static_cast<long long>(params.copy) * params.copy > params.branching();
}

std::complex<double> limit_charfn(const SpinParams& params, double s) {
  params.validate();
  const long double ell = params.copy;
  const long double b = params.branching();
  const long double r = params.fresh;
  const long double rho = b / (ell * ell);

  long double logmag = 0.0L;
  int sign = 1;
  bool zero = false;

  long double x = static_cast<long double>(s) / ell;  // s * copy^-k
  long double weight = r;                             // fresh * branching^(k-1)
  for (int k = 1; k <= 1000000; ++k) {
    if (x == 0.0L) break;
    if (std::fabs(x) < 1e-8L) {
      if (rho < 1.0L) {
        // quadratic tail of the remaining factors, geometric in rho
        const long double sum_rho = std::pow(rho, static_cast<long double>(k)) / (1.0L - rho);
        logmag -= (r * static_cast<long double>(s) * s / (2.0L * b)) * sum_rho;
        break;
      }
      // divergent regime: factors keep shrinking the product; step explicitly
      logmag -= weight * x * x / 2.0L;
    } else {
      const long double c = std::cos(x);
      if (c == 0.0L) {
        zero = true;
        break;
      }
      if (c < 0.0L) {
        // exponent parity: fresh * branching^(k-1)
        const bool odd_exp = (params.fresh % 2 == 1) && (k == 1 || params.branching() % 2 == 1);
        if (odd_exp) sign = -sign;
      }
      logmag += weight * std::log(std::fabs(c));
    }
    if (logmag < -1500.0L) {
      zero = true;
      break;
    }
    x /= ell;
    weight *= b;
  }

  if (zero) return {0.0, 0.0};
  const double mag = static_cast<double>(sign * std::exp(logmag));
  return std::polar(1.0, s) * mag;
}

Moments normalized_moments(const SpinParams& params, int level, const PmfOptions& opt) {
  const ExactPmf pmf = exact_pmf(params, level, opt);
  const long double mean = pmf.mean_ld();
  long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
  for (std::size_t i = 0; i < pmf.points(); ++i) {
    const long double w = pmf.mass_ld(i);
    const long double d = static_cast<long double>(pmf.x_at(i)) - mean;
    const long double d2 = d * d;
    m2 += w * d2;
    m3 += w * d2 * d;
    m4 += w * d2 * d2;
  }
  Moments m;
  m.mean = static_cast<double>(mean);
  m.variance = static_cast<double>(m2);
  if (m2 > 0.0L) {
    m.skewness = static_cast<double>(m3 / std::pow(m2, 1.5L));
    m.excess_kurtosis = static_cast<double>(m4 / (m2 * m2) - 3.0L);
  } else {
    m.skewness = std::numeric_limits<double>::quiet_NaN();
    m.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

}  // namespace eitlab::spin_tree
