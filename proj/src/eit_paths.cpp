#include "eitlab/eit_paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "eitlab/rng.hpp"
#include "eitlab/spin_tree.hpp"
#include "eitlab/stats.hpp"
#include "eitlab/walk.hpp"

namespace eitlab::paths {

void PathMeasureSpec::validate() const {
  if (kind == MeasureKind::uniform) {
    if (dimension < 2)
      throw std::invalid_argument("path measure: uniform kind needs dimension >= 2");
  } else {
    if (dimension != 3)
      throw std::invalid_argument("path measure: z3 kind is three-dimensional");
    params.validate();
    // alpha > 1/2 is what makes the collision profile square-summable
    if (params.alpha() <= 0.5)
      throw std::invalid_argument("path measure: z3 kind needs copy^2 > branching");
  }
}

namespace {

// oriented step of the z3 path: even indices advance the second coordinate
// pair, odd indices the first, and the slack always lands on axis 2
std::uint8_t z3_step(std::size_t n, const std::vector<long long>& w,
                     const std::vector<long long>& ws) {
  if (n % 2 == 0) {
    const std::size_t m = n / 2;
    const long long d = ws[m + 1] - ws[m];
    if (d != 0 && d != 1) throw std::logic_error("z3 path: half-coordinate step not 0/1");
    return d ? std::uint8_t{1} : std::uint8_t{2};
  }
  const std::size_t m = (n - 1) / 2;
  const long long d = w[m + 1] - w[m];
  if (d != 0 && d != 1) throw std::logic_error("z3 path: half-coordinate step not 0/1");
  return d ? std::uint8_t{0} : std::uint8_t{2};
}

}  // namespace

LatticePath sample_oriented(const PathMeasureSpec& spec, std::size_t length) {
  spec.validate();
  LatticePath path;
  path.dimension = spec.dimension;
  path.increments.resize(length);

  if (spec.kind == MeasureKind::uniform) {
    const auto d = static_cast<std::uint32_t>(spec.dimension);
    for (std::size_t i = 0; i < length; ++i) {
      path.increments[i] = static_cast<std::uint8_t>(
          rng::uniform_below(rng::hash2(spec.seed, rng::tag::kStep, i), d));
    }
    return path;
  }

  // two independent walks drive the two free coordinates; W_m pairs with the
  // floor-half index and W#_m with the ceiling-half index
  const std::size_t n_w = length / 2;
  const std::size_t n_ws = (length + 1) / 2;
  const auto w = walk::half_coordinate(
      walk::sample_path(spec.params, rng::subseed(spec.seed, rng::tag::kWalkW, 0), n_w));
  const auto ws = walk::half_coordinate(
      walk::sample_path(spec.params, rng::subseed(spec.seed, rng::tag::kWalkWs, 0), n_ws));
  for (std::size_t n = 0; n < length; ++n) path.increments[n] = z3_step(n, w, ws);
  return path;
}

std::pair<LatticePath, LatticePath> sample_pair(const PathMeasureSpec& spec,
                                                std::size_t length,
                                                std::uint64_t pair_index) {
  PathMeasureSpec a = spec;
  PathMeasureSpec b = spec;
  a.seed = rng::subseed(spec.seed, rng::tag::kPairA, pair_index);
  b.seed = rng::subseed(spec.seed, rng::tag::kPairB, pair_index);
  return {sample_oriented(a, length), sample_oriented(b, length)};
}

long long collision_count(const LatticePath& a, const LatticePath& b) {
  if (a.dimension != b.dimension || a.dimension <= 0)
    throw std::invalid_argument("collision_count: dimension mismatch");
  const auto d = static_cast<std::size_t>(a.dimension);
  const std::size_t n = std::min(a.increments.size(), b.increments.size());

  std::vector<long long> pa(d, 0), pb(d, 0);
  std::size_t differing = 0;  // coordinates where pa != pb
  long long count = 1;        // both paths start at the origin
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t ia = a.increments[t], ib = b.increments[t];
    if (ia >= d || ib >= d) throw std::invalid_argument("collision_count: bad increment");
    if (pa[ia] == pb[ia]) ++differing;
    ++pa[ia];
    if (pa[ia] == pb[ia]) --differing;
    if (pb[ib] == pa[ib]) ++differing;
    ++pb[ib];
    if (pb[ib] == pa[ib]) --differing;
    if (differing == 0) ++count;
  }
  return count;
}

namespace {

// edge of an oriented path keyed by (tail vertex, axis), packed into bytes
std::string edge_key(const std::vector<long long>& pos, std::uint8_t axis) {
  std::string key(pos.size() * sizeof(long long) + 1, '\0');
  std::memcpy(key.data(), pos.data(), pos.size() * sizeof(long long));
  key.back() = static_cast<char>(axis);
  return key;
}

}  // namespace

long long shared_edge_count(const LatticePath& a, const LatticePath& b) {
  if (a.dimension != b.dimension || a.dimension <= 0)
    throw std::invalid_argument("shared_edge_count: dimension mismatch");
  const auto d = static_cast<std::size_t>(a.dimension);

  std::unordered_set<std::string> edges;
  edges.reserve(a.increments.size() * 2);
  std::vector<long long> pos(d, 0);
  for (const std::uint8_t ia : a.increments) {
    if (ia >= d) throw std::invalid_argument("shared_edge_count: bad increment");
    edges.insert(edge_key(pos, ia));
    ++pos[ia];
  }

  std::fill(pos.begin(), pos.end(), 0);
  long long shared = 0;
  for (const std::uint8_t ib : b.increments) {
    if (ib >= d) throw std::invalid_argument("shared_edge_count: bad increment");
    if (edges.erase(edge_key(pos, ib)) > 0) ++shared;
    ++pos[ib];
  }
  return shared;
}

double TailFit::survival(long long c) const {
  if (pairs == 0) return 0.0;
  std::uint64_t tail = 0;
  for (std::size_t i = c < 0 ? 0 : static_cast<std::size_t>(c); i < counts.size(); ++i)
    tail += counts[i];
  return static_cast<double>(tail) / static_cast<double>(pairs);
}

namespace {

TailFit fit_one_scale(const PathMeasureSpec& spec, std::size_t length, std::size_t pairs,
                      double fit_floor, double fit_ceiling) {
  TailFit fit;
  fit.pairs = pairs;
  for (std::uint64_t i = 0; i < pairs; ++i) {
    auto [a, b] = sample_pair(spec, length, i);
    const auto c = static_cast<std::size_t>(collision_count(a, b));
    if (c >= fit.counts.size()) fit.counts.resize(c + 1, 0);
    ++fit.counts[c];
  }

  // survival curve from the top down
  const std::size_t top = fit.counts.size();
  std::vector<double> surv(top + 1, 0.0);
  std::uint64_t acc = 0;
  for (std::size_t c = top; c-- > 0;) {
    acc += fit.counts[c];
    surv[c] = static_cast<double>(acc) / static_cast<double>(pairs);
  }

  double min_positive = 1.0;
  for (std::size_t c = 0; c < top; ++c)
    if (surv[c] > 0.0) min_positive = std::min(min_positive, surv[c]);
  fit.truncated = min_positive > fit_floor;

  std::vector<std::pair<double, double>> xy;
  for (std::size_t c = 1; c < top; ++c) {
    if (surv[c] >= fit_floor && surv[c] <= fit_ceiling) {
      if (xy.empty()) fit.fit_range.lo = static_cast<long long>(c);
      fit.fit_range.hi = static_cast<long long>(c);
      xy.emplace_back(static_cast<double>(c), std::log(surv[c]));
    }
  }
  fit.fit_points = static_cast<int>(xy.size());
  if (fit.fit_points < 3) {
    fit.degenerate = true;
    return fit;
  }

  const stats::LineFit ls = stats::least_squares(xy);
  fit.theta_hat = std::exp(ls.slope);
  fit.c_hat = std::exp(ls.intercept);
  const double z = 1.959963984540054;
  fit.theta_lo = std::exp(ls.slope - z * ls.slope_se);
  fit.theta_hi = std::exp(ls.slope + z * ls.slope_se);

  double major = 0.0;
  for (std::size_t c = 0; c < top; ++c)
    if (surv[c] > 0.0)
      major = std::max(major, surv[c] / std::pow(fit.theta_hat, static_cast<double>(c)));
  fit.c_major = major;

  // within-window curvature: fit the two halves separately; a healthy
  // geometric tail keeps both slopes close, a convex curve flattens out
  const std::size_t half = xy.size() / 2;
  std::vector<std::pair<double, double>> lohalf(xy.begin(), xy.begin() + half);
  std::vector<std::pair<double, double>> hihalf(xy.begin() + half, xy.end());
  if (lohalf.size() >= 2 && hihalf.size() >= 2) {
    fit.slope_first = stats::least_squares(lohalf).slope;
    fit.slope_second = stats::least_squares(hihalf).slope;
    fit.nonexponential =
        fit.slope_second > 0.5 * fit.slope_first || fit.slope_first >= 0.0;
  }
  return fit;
}

}  // namespace

TailFit tail_fit(const PathMeasureSpec& spec, std::size_t length, std::size_t pairs,
                 double fit_floor, double fit_ceiling) {
  spec.validate();
  if (pairs < 1000) throw std::invalid_argument("tail_fit: need at least 10^3 pairs");
  if (!(fit_floor > 0 && fit_floor < fit_ceiling && fit_ceiling <= 1.0))
    throw std::invalid_argument("tail_fit: bad fit window");

  TailFit fit = fit_one_scale(spec, length, pairs, fit_floor, fit_ceiling);
  if (fit.degenerate) return fit;

  // scale-dependence probe: refit at a quarter of the length (same pair
  // seeds, so the short paths are prefixes of the long ones).  a geometric
  // tail gives the same theta at both scales; a recurrent control drifts
  // upward because longer paths keep finding more collisions.  the refit
  // needs length >= 128 to clear the forced-collision head, after which the
  // 0.02 floor sits well above the truncation wobble of the exponential
  // cases (measured: z3 +0.009 and shrinking, uniform d=4 +0.007) and well
  // below the recurrent drift (uniform d=3: +0.045 and growing).
  const std::size_t short_length = length / 4;
  if (short_length >= 128 && short_length < length) {
    const TailFit shadow = fit_one_scale(spec, short_length, pairs, fit_floor, fit_ceiling);
    if (!shadow.degenerate && std::isfinite(shadow.theta_hat)) {
      fit.theta_short = shadow.theta_hat;
      fit.theta_drift = fit.theta_hat - shadow.theta_hat;
      const double se_long = (fit.theta_hi - fit.theta_lo) / (2 * 1.959963984540054);
      const double se_short = (shadow.theta_hi - shadow.theta_lo) / (2 * 1.959963984540054);
      const double se = std::sqrt(se_long * se_long + se_short * se_short);
      if (fit.theta_drift > 0.02 && fit.theta_drift > 3 * se) fit.nonexponential = true;
    }
  }
  return fit;
}

ReturnEstimate theta_d_estimate(int d, std::uint64_t seed, std::size_t walks,
                                long long horizon) {
  // the difference walk lives on the hyperplane of zero coordinate sum, so
  // below four dimensions it is recurrent and the return probability is 1
  if (d < 4) throw std::invalid_argument("theta_d_estimate: need dimension >= 4");
  if (d > 64) throw std::invalid_argument("theta_d_estimate: dimension too large");
  if (walks < 100) throw std::invalid_argument("theta_d_estimate: need >= 100 walks");
  if (horizon < 10000) throw std::invalid_argument("theta_d_estimate: horizon < 10^4");

  const auto ud = static_cast<std::uint32_t>(d);
  std::size_t returns = 0;
  std::vector<long long> pos(static_cast<std::size_t>(d));
  for (std::size_t w = 0; w < walks; ++w) {
    const std::uint64_t ws = rng::subseed(seed, rng::tag::kReplica, w);
    std::fill(pos.begin(), pos.end(), 0);
    std::size_t nonzero = 0;
    for (long long n = 1; n <= horizon; ++n) {
      const std::uint32_t i = rng::uniform_below(rng::hash3(ws, rng::tag::kStep, n, 0), ud);
      const std::uint32_t j = rng::uniform_below(rng::hash3(ws, rng::tag::kStep, n, 1), ud);
      if (pos[i] == 0) ++nonzero;
      ++pos[i];
      if (pos[i] == 0) --nonzero;
      if (pos[j] == 0) ++nonzero;
      --pos[j];
      if (pos[j] == 0) --nonzero;
      if (nonzero == 0) {
        ++returns;
        break;
      }
    }
  }

  ReturnEstimate est;
  est.walks = walks;
  est.horizon = horizon;
  est.estimate = static_cast<double>(returns) / static_cast<double>(walks);
  const stats::Wilson w = stats::wilson95(est.estimate, static_cast<double>(walks));
  est.lo = std::max(0.0, w.center - w.half);
  est.hi = std::min(1.0, w.center + w.half);
  return est;
}

namespace {

// certified upper bound for sum_{k>=1} bound(k*m), bound nonincreasing:
// 2^16 direct terms, then dyadic blocks (lo, 2*lo] each bounded by
// lo * bound((lo+1)*m), then a geometric handoff once the block ratio settles
long double certified_series(const std::function<double(long long)>& bound,
                             long long m) {
  constexpr long long kDirect = 1 << 16;
  long double s = 0;
  for (long long k = 1; k <= kDirect; ++k) {
    const double v = bound(k * m);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("profile bound must be finite and nonnegative");
    s += v;
    if (s >= 1.0L) return s;  // this m already fails, no tail needed
  }

  constexpr int kBlocks = 8;
  long double blocks[kBlocks];
  long long lo = kDirect;
  for (int j = 0; j < kBlocks; ++j) {
    const double v = bound((lo + 1) * m);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("profile bound must be finite and nonnegative");
    blocks[j] = static_cast<long double>(lo) * v;
    s += blocks[j];
    lo *= 2;
  }
  if (blocks[kBlocks - 1] > 0) {
    long double r = 0;
    for (int j = kBlocks - 3; j < kBlocks; ++j)
      if (blocks[j - 1] > 0) r = std::max(r, blocks[j] / blocks[j - 1]);
    if (!(r < 0.995L)) return std::numeric_limits<long double>::infinity();
    s += blocks[kBlocks - 1] * r / (1 - r);
  }
  return s;
}

}  // namespace

EitConstants eit_constants_from_profile(
    const std::function<double(long long)>& bound) {
  constexpr long long kMaxM = 1ll << 20;

  long long hi = 1;
  long double beta_hi = certified_series(bound, hi);
  while (beta_hi >= 1.0L) {
    hi *= 2;
    if (hi > kMaxM)
      throw std::runtime_error(
          "eit constants: series never drops below 1 for spacing up to 2^20; "
          "profile bound not summable enough");
    beta_hi = certified_series(bound, hi);
  }

  // smallest spacing that certifies beta < 1; the series is nonincreasing in
  // the spacing, which makes bisection exact
  long long lo_fail = hi / 2;  // 0 when hi == 1
  while (hi - lo_fail > 1) {
    const long long mid = lo_fail + (hi - lo_fail) / 2;
    if (certified_series(bound, mid) < 1.0L)
      hi = mid;
    else
      lo_fail = mid;
  }
  while (hi > 1 && certified_series(bound, hi - 1) < 1.0L) --hi;  // belt and braces

  EitConstants out;
  out.m = hi;
  const long double beta = certified_series(bound, hi);
  out.beta = static_cast<double>(beta);
  if (beta <= 0.0L) {
    out.degenerate_perfect = true;
    out.theta = 0.0;
    out.c = std::numeric_limits<double>::infinity();
  } else {
    out.theta = static_cast<double>(
        std::exp(std::log(static_cast<double>(beta)) / static_cast<double>(hi)));
    out.c = static_cast<double>(hi) / out.beta;
  }
  return out;
}

std::function<double(long long)> z3_profile_bound(const SpinParams& params) {
  params.validate();
  if (params.alpha() <= 0.5)
    throw std::invalid_argument("z3 profile bound: needs copy^2 > branching");
  // collisions force both driving walks to agree, and each agreement costs at
  // most the one-walk profile bound at half the index
  const double c_alpha = std::pow(2.0 * params.branching(), params.alpha()) *
                         spin_tree::concentration_constant(params);
  const double c2 = c_alpha * c_alpha;
  const double two_alpha = 2.0 * params.alpha();
  return [c2, two_alpha](long long k) -> double {
    const long long half = k / 2;
    if (half <= 0) return 1.0;
    return std::min(1.0, c2 * std::pow(static_cast<double>(half), -two_alpha));
  };
}

}  // namespace eitlab::paths
