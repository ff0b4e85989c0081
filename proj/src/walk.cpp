#include "eitlab/walk.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "eitlab/errors.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/spin_tree.hpp"

namespace eitlab::walk {

std::optional<std::pair<std::uint64_t, std::uint64_t>> fresh_ancestor(
    const SpinParams& params, std::uint64_t index) {
  const std::uint64_t b = static_cast<std::uint64_t>(params.branching());
  const std::uint64_t copy = static_cast<std::uint64_t>(params.copy);
  std::uint64_t i = index;
  std::uint64_t h = 0;  // height above the leaf line
  while (i != 0) {
    if (i % b >= copy) {
      // nearest ancestor hanging by an independent digit; its identity
      // (height, index-at-that-height) does not change when the tree is
      // embedded deeper, which is what makes levels consistent
      return std::make_pair(h, i);
    }
    i /= b;
    ++h;
  }
  return std::nullopt;  // pure copy-chain from the root
}

int spin_at_index(const SpinParams& params, std::uint64_t seed, std::uint64_t index) {
  const auto slot = fresh_ancestor(params, index);
  if (!slot) return 1;  // the root spin is +1
  return rng::sign_bit(rng::hash3(seed, rng::tag::kSpin, slot->first, slot->second));
}

int spin_at(const SpinParams& params, std::uint64_t seed, const VertexAddress& v) {
  params.validate();
  const std::uint64_t b = static_cast<std::uint64_t>(params.branching());
  std::uint64_t index = 0;
  for (std::uint8_t d : v.digits) {
    if (d >= b)
      throw std::invalid_argument("spin_at: digit " + std::to_string(d) +
                                  " out of range for branching " + std::to_string(b));
    if (index > (~std::uint64_t{0} - d) / b)
      throw std::invalid_argument("spin_at: address too deep to index");
    index = index * b + d;
  }
  return spin_at_index(params, seed, index);
}

WalkPath sample_path(const SpinParams& params, std::uint64_t seed, std::size_t n) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  WalkPath p;
  p.steps.resize(n);
  for (std::size_t m = 0; m < n; ++m)
    p.steps[m] = static_cast<signed char>(spin_at_index(params, seed, m));
  return p;
}

WalkPath sample_srw(std::uint64_t seed, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_srw: n must be >= 1");
  WalkPath p;
  p.steps.resize(n);
  for (std::size_t m = 0; m < n; ++m)
    p.steps[m] = static_cast<signed char>(rng::sign_bit(rng::hash2(seed, rng::tag::kSrw, m)));
  return p;
}

namespace {

// Stationary sampler: the leaf window floats at offset O = sum o_t b^t with
// i.i.d. uniform digits o_t, drawn lazily as the carry propagation needs
// them.  Fresh-spin identities are keyed relative to the offset branch, so
// every physical vertex has exactly one key no matter which leaves reach it.
class OffsetWalker {
 public:
  OffsetWalker(const SpinParams& params, std::uint64_t seed)
      : b_(static_cast<std::uint32_t>(params.branching())),
        copy_(static_cast<std::uint32_t>(params.copy)),
        seed_(seed) {}

  int spin_rel(std::uint64_t m) {
    m_digits_.clear();
    while (m != 0) {
      m_digits_.push_back(static_cast<std::uint32_t>(m % b_));
      m /= b_;
    }

    sum_digits_.clear();
    low_offset_digits_.clear();
    int h_star = -1;
    std::uint32_t carry = 0;
    std::size_t h = 0;
    while (h < m_digits_.size() || carry != 0) {
      const std::uint32_t o = offset_digit(h);
      const std::uint32_t md = h < m_digits_.size() ? m_digits_[h] : 0;
      const std::uint32_t tot = o + md + carry;
      const std::uint32_t s = tot % b_;
      carry = tot / b_;
      low_offset_digits_.push_back(o);
      sum_digits_.push_back(s);
      if (h_star < 0 && s >= copy_) h_star = static_cast<int>(h);
      ++h;
    }

    if (h_star >= 0) {
      // index of the deciding ancestor relative to the offset branch
      long long rel = 0;
      for (int t = static_cast<int>(sum_digits_.size()) - 1; t >= h_star; --t)
        rel = rel * b_ + (static_cast<long long>(sum_digits_[static_cast<std::size_t>(t)]) -
                          low_offset_digits_[static_cast<std::size_t>(t)]);
      return rng::sign_bit(rng::hash3(seed_, rng::tag::kSpin,
                                      static_cast<std::uint64_t>(h_star),
                                      static_cast<std::uint64_t>(rel)));
    }

    // the leaf's chain merges into the offset branch; resolve along it
    for (std::size_t t = h; t < h + 4096; ++t) {
      if (offset_digit(t) >= copy_)
        return rng::sign_bit(rng::hash3(seed_, rng::tag::kSpin, t, 0));
    }
    throw std::logic_error("stationary spin scan failed to terminate");
  }

 private:
  std::uint32_t offset_digit(std::size_t t) {
    while (t >= offset_.size()) {
      const std::size_t i = offset_.size();
      offset_.push_back(rng::uniform_below(rng::hash2(seed_, rng::tag::kOffsetDigit, i), b_));
    }
    return offset_[t];
  }

  std::uint32_t b_, copy_;
  std::uint64_t seed_;
  std::vector<std::uint32_t> offset_;
  std::vector<std::uint32_t> m_digits_, sum_digits_, low_offset_digits_;
};

}  // namespace

WalkPath sample_stationary(const SpinParams& params, std::uint64_t seed, std::size_t n) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample_stationary: n must be >= 1");
  OffsetWalker w(params, seed);
  WalkPath p;
  p.steps.resize(n);
  for (std::size_t m = 0; m < n; ++m)
    p.steps[m] = static_cast<signed char>(w.spin_rel(m));
  return p;
}

std::vector<long long> half_coordinate(const WalkPath& path) {
  if (path.start != 0)
    throw std::invalid_argument("half_coordinate: path must start at 0");
  std::vector<long long> w(path.steps.size() + 1);
  w[0] = 0;
  for (std::size_t i = 0; i < path.steps.size(); ++i)
    w[i + 1] = w[i] + (path.steps[i] > 0 ? 1 : 0);
  return w;
}

double profile_bound(const SpinParams& params, long long k) {
  const double alpha = params.alpha();
  const double c = spin_tree::concentration_constant(params);
  return std::pow(2.0 * params.branching(), alpha) * c *
         std::pow(static_cast<double>(k), -alpha);
}

ProfileEstimate exact_conditional_profile(const SpinParams& params, int level, int n, int k) {
  params.validate();
  if (level < 1 || n < 0 || k < 1)
    throw std::invalid_argument("exact_conditional_profile: need level >= 1, n >= 0, k >= 1");
  const std::uint64_t b = static_cast<std::uint64_t>(params.branching());

  unsigned __int128 capacity = 1;
  for (int t = 0; t < level && capacity <= (static_cast<unsigned __int128>(1) << 40); ++t)
    capacity *= b;
  const int window = n + k;
  if (static_cast<unsigned __int128>(window) > capacity)
    throw std::invalid_argument("exact_conditional_profile: n + k exceeds the leaf count");

  long long slots_total = 0, level_size = 1;
  for (int t = 0; t < level; ++t) {
    slots_total += params.fresh * level_size;
    level_size *= params.branching();
    if (slots_total > 64) break;
  }
  if (slots_total > 24)
    throw budget_error("exact_conditional_profile: " + std::to_string(slots_total) +
                       " independent spins exceed the enumeration budget of 24");
  if (n > 64) throw budget_error("exact_conditional_profile: history packing limit is 64 steps");

  // per-leaf deciding slot: -1 means a root copy-chain (+1); otherwise an
  // index into the distinct fresh ancestors that touch the window
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> slot_ids;
  std::vector<int> leaf_slot(static_cast<std::size_t>(window), -1);
  for (int j = 0; j < window; ++j) {
    std::uint64_t i = static_cast<std::uint64_t>(j);
    std::uint64_t h = 0;
    while (i != 0) {
      if (i % b >= static_cast<std::uint64_t>(params.copy)) {
        auto [it, fresh] = slot_ids.try_emplace({h, i}, static_cast<int>(slot_ids.size()));
        (void)fresh;
        leaf_slot[static_cast<std::size_t>(j)] = it->second;
        break;
      }
      i /= b;
      ++h;
    }
  }
  const int nslots = static_cast<int>(slot_ids.size());

  std::map<std::uint64_t, std::map<long long, std::uint64_t>> by_history;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nslots); ++mask) {
    long long s = 0;
    std::uint64_t hist = 0;
    for (int j = 0; j < window; ++j) {
      const int slot = leaf_slot[static_cast<std::size_t>(j)];
      const int spin = slot < 0 ? 1 : (((mask >> slot) & 1) ? 1 : -1);
      s += spin;
      if (j < n) hist = (hist << 1) | static_cast<std::uint64_t>(spin > 0);
    }
    ++by_history[hist][s];
  }

  double best = 0.0;
  for (const auto& [hist, final_counts] : by_history) {
    (void)hist;
    std::uint64_t total = 0, top = 0;
    for (const auto& [x, c] : final_counts) {
      (void)x;
      total += c;
      top = std::max(top, c);
    }
    best = std::max(best, static_cast<double>(top) / static_cast<double>(total));
  }

  ProfileEstimate est;
  est.k = k;
  est.bound_kind = ProfileKind::exact_conditional;
  est.value = best;
  est.ci_halfwidth = 0.0;
  est.bound = profile_bound(params, k);
  est.flagged = est.value > est.bound * (1.0 + 1e-12);
  return est;
}

namespace {

struct Wilson {
  double center, half;
};

Wilson wilson95(double phat, double n) {
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  Wilson w;
  w.center = (phat + z2 / (2.0 * n)) / denom;
  w.half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return w;
}

template <typename StepFn>
std::vector<ProfileEstimate> concentration_core(const std::vector<long long>& ks,
                                                std::size_t samples, StepFn&& end_value) {
  std::vector<ProfileEstimate> out;
  out.reserve(ks.size());
  for (const long long k : ks) {
    if (k < 1) throw std::invalid_argument("concentration: lags must be >= 1");
    std::map<long long, std::uint64_t> counts;
    for (std::size_t s = 0; s < samples; ++s) ++counts[end_value(k, s)];
    std::uint64_t top = 0;
    for (const auto& [x, c] : counts) {
      (void)x;
      top = std::max(top, c);
    }
    ProfileEstimate est;
    est.k = k;
    est.bound_kind = ProfileKind::unconditional_mc;
    est.value = static_cast<double>(top) / static_cast<double>(samples);
    est.ci_halfwidth = wilson95(est.value, static_cast<double>(samples)).half;
    out.push_back(est);
  }
  return out;
}

}  // namespace

std::vector<ProfileEstimate> unconditional_concentration(const SpinParams& params,
                                                         std::uint64_t seed,
                                                         const std::vector<long long>& ks,
                                                         std::size_t samples) {
  params.validate();
  if (samples < 1000)
    throw std::invalid_argument("unconditional_concentration: need at least 10^3 samples");
  auto estimates = concentration_core(ks, samples, [&](long long k, std::size_t s) {
    const std::uint64_t sub = rng::hash3(seed, rng::tag::kSample,
                                         static_cast<std::uint64_t>(k), s);
    long long v = 0;
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(k); ++j)
      v += spin_at_index(params, sub, j);
    return v;
  });
  for (auto& est : estimates) {
    est.bound = profile_bound(params, est.k);
    const Wilson w = wilson95(est.value, static_cast<double>(samples));
    est.flagged = (w.center - w.half) > est.bound;
  }
  return estimates;
}

std::vector<ProfileEstimate> srw_concentration(std::uint64_t seed,
                                               const std::vector<long long>& ks,
                                               std::size_t samples) {
  if (samples < 1000)
    throw std::invalid_argument("srw_concentration: need at least 10^3 samples");
  return concentration_core(ks, samples, [&](long long k, std::size_t s) {
    const std::uint64_t sub = rng::hash3(seed, rng::tag::kSample,
                                         static_cast<std::uint64_t>(k), s);
    long long v = 0;
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(k); ++j)
      v += rng::sign_bit(rng::hash2(sub, rng::tag::kSrw, j));
    return v;
  });
}

}  // namespace eitlab::walk
