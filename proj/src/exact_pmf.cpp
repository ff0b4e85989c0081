#include "eitlab/exact_pmf.hpp"

#include <fftw3.h>
#include <gmp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eitlab/errors.hpp"

namespace eitlab::spin_tree {

long double dyadic_to_ld(const mpz_class& num, long exp2) {
  if (num == 0) return 0.0L;
  const std::size_t nb = mpz_sizeinbase(num.get_mpz_t(), 2);
  if (nb <= 64) {
    unsigned long long lo = mpz_get_ui(num.get_mpz_t());
    return std::ldexp(static_cast<long double>(lo), -static_cast<int>(exp2));
  }
  // keep the top 64 bits; truncation error is below one mantissa ulp
  mpz_class top = num >> (nb - 64);
  unsigned long long t = mpz_get_ui(top.get_mpz_t());
  return std::ldexp(static_cast<long double>(t),
                    static_cast<int>(nb - 64) - static_cast<int>(exp2));
}

long double ExactPmf::mass_ld(std::size_t i) const {
  if (mode == PmfMode::rational) return dyadic_to_ld(num[i], static_cast<long>(denom_log2));
  return mass[i];
}

double ExactPmf::mass_at(long long x) const {
  const long long d = x - offset;
  if (d < 0 || d % 2 != 0) return 0.0;
  const std::size_t i = static_cast<std::size_t>(d / 2);
  if (i >= points()) return 0.0;
  return static_cast<double>(mass_ld(i));
}

long double ExactPmf::max_mass() const {
  if (mode == PmfMode::rational) {
    const mpz_class* best = &num[0];
    for (const auto& v : num)
      if (v > *best) best = &v;
    return dyadic_to_ld(*best, static_cast<long>(denom_log2));
  }
  long double m = 0.0L;
  for (long double v : mass) m = std::max(m, v);
  return m;
}

long double ExactPmf::total_mass() const {
  if (mode == PmfMode::rational) {
    mpz_class s = 0;
    for (const auto& v : num) s += v;
    return dyadic_to_ld(s, static_cast<long>(denom_log2));
  }
  long double s = 0.0L;
  for (long double v : mass) s += v;
  return s;
}

long double ExactPmf::mean_ld() const {
  if (mode == PmfMode::rational) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < num.size(); ++i) s += num[i] * static_cast<long>(x_at(i));
    return dyadic_to_ld(s, static_cast<long>(denom_log2));
  }
  long double s = 0.0L;
  for (std::size_t i = 0; i < mass.size(); ++i) s += mass[i] * x_at(i);
  return s;
}

ExactPmf to_extended_float(const ExactPmf& p) {
  if (p.mode == PmfMode::extended_float) return p;
  ExactPmf out;
  out.level = p.level;
  out.offset = p.offset;
  out.mode = PmfMode::extended_float;
  out.mass.resize(p.num.size());
  for (std::size_t i = 0; i < p.num.size(); ++i)
    out.mass[i] = dyadic_to_ld(p.num[i], static_cast<long>(p.denom_log2));
  return out;
}

ExactPmf mirror(const ExactPmf& p) {
  ExactPmf out = p;
  out.offset = -p.x_max();
  if (p.mode == PmfMode::rational)
    std::reverse(out.num.begin(), out.num.end());
  else
    std::reverse(out.mass.begin(), out.mass.end());
  return out;
}

namespace {

void check_budget(std::size_t len, const PmfOptions& opt, const char* what) {
  if (len > opt.support_budget)
    throw budget_error(std::string(what) + ": support would reach " + std::to_string(len) +
                       " points, budget is " + std::to_string(opt.support_budget));
}

}  // namespace

ExactPmf symmetrize(const ExactPmf& p, const PmfOptions& opt) {
  // support of eps*X spans [-|x|max, |x|max] on the same parity grid
  const long long lo = std::min(p.offset, -p.x_max());
  const long long hi = std::max(p.x_max(), -p.offset);
  const std::size_t len = static_cast<std::size_t>((hi - lo) / 2) + 1;
  check_budget(len, opt, "symmetrize");

  ExactPmf out;
  out.level = p.level;
  out.offset = lo;
  out.mode = p.mode;
  auto idx = [&](long long x) { return static_cast<std::size_t>((x - lo) / 2); };
  if (p.mode == PmfMode::rational) {
    out.denom_log2 = p.denom_log2 + 1;
    out.num.assign(len, mpz_class(0));
    for (std::size_t i = 0; i < p.num.size(); ++i) {
      const long long x = p.x_at(i);
      out.num[idx(x)] += p.num[i];
      out.num[idx(-x)] += p.num[i];
    }
  } else {
    out.mass.assign(len, 0.0L);
    for (std::size_t i = 0; i < p.mass.size(); ++i) {
      const long long x = p.x_at(i);
      out.mass[idx(x)] += 0.5L * p.mass[i];
      out.mass[idx(-x)] += 0.5L * p.mass[i];
    }
  }
  return out;
}

std::vector<mpz_class> convolve_exact(const std::vector<mpz_class>& a,
                                      const std::vector<mpz_class>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t la = a.size(), lb = b.size(), lc = la + lb - 1;

  std::size_t abits = 0, bbits = 0;
  for (const auto& v : a)
    if (v != 0) abits = std::max(abits, mpz_sizeinbase(v.get_mpz_t(), 2));
  for (const auto& v : b)
    if (v != 0) bbits = std::max(bbits, mpz_sizeinbase(v.get_mpz_t(), 2));
  if (abits == 0 || bbits == 0) return std::vector<mpz_class>(lc, mpz_class(0));

  // Kronecker substitution: evaluate both polynomials at 2^(64*slot_words),
  // multiply once, read coefficients back out of disjoint slots.
  const std::size_t guard = std::bit_width(std::min(la, lb));
  const std::size_t slot_words = (abits + bbits + guard + 63) / 64;

  std::vector<std::uint64_t> buf_a(la * slot_words, 0), buf_b(lb * slot_words, 0);
  for (std::size_t i = 0; i < la; ++i)
    if (a[i] != 0) mpz_export(&buf_a[i * slot_words], nullptr, -1, 8, 0, 0, a[i].get_mpz_t());
  for (std::size_t i = 0; i < lb; ++i)
    if (b[i] != 0) mpz_export(&buf_b[i * slot_words], nullptr, -1, 8, 0, 0, b[i].get_mpz_t());

  mpz_class big_a, big_b;
  mpz_import(big_a.get_mpz_t(), buf_a.size(), -1, 8, 0, 0, buf_a.data());
  mpz_import(big_b.get_mpz_t(), buf_b.size(), -1, 8, 0, 0, buf_b.data());
  const mpz_class prod = big_a * big_b;

  std::vector<std::uint64_t> buf_c(lc * slot_words + 1, 0);
  std::size_t words_written = 0;
  mpz_export(buf_c.data(), &words_written, -1, 8, 0, 0, prod.get_mpz_t());
  if (words_written > lc * slot_words)
    throw std::logic_error("convolve_exact: packed product overflowed its slots");

  std::vector<mpz_class> c(lc);
  for (std::size_t k = 0; k < lc; ++k)
    mpz_import(c[k].get_mpz_t(), slot_words, -1, 8, 0, 0, &buf_c[k * slot_words]);
  return c;
}

namespace {

std::vector<long double> convolve_float_fft(const std::vector<long double>& a,
                                            const std::vector<long double>& b) {
  const std::size_t lc = a.size() + b.size() - 1;
  std::size_t n = std::bit_ceil(lc);

  long double* ra = fftwl_alloc_real(n);
  long double* rb = fftwl_alloc_real(n);
  fftwl_complex* fa = fftwl_alloc_complex(n / 2 + 1);
  fftwl_complex* fb = fftwl_alloc_complex(n / 2 + 1);

  std::fill(ra, ra + n, 0.0L);
  std::fill(rb, rb + n, 0.0L);
  std::copy(a.begin(), a.end(), ra);
  std::copy(b.begin(), b.end(), rb);

  fftwl_plan pf_a = fftwl_plan_dft_r2c_1d(static_cast<int>(n), ra, fa, FFTW_ESTIMATE);
  fftwl_plan pf_b = fftwl_plan_dft_r2c_1d(static_cast<int>(n), rb, fb, FFTW_ESTIMATE);
  fftwl_execute(pf_a);
  fftwl_execute(pf_b);

  for (std::size_t i = 0; i <= n / 2; ++i) {
    const long double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const long double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }

  fftwl_plan pb = fftwl_plan_dft_c2r_1d(static_cast<int>(n), fa, ra, FFTW_ESTIMATE);
  fftwl_execute(pb);

  std::vector<long double> c(lc);
  const long double scale = 1.0L / static_cast<long double>(n);
  for (std::size_t i = 0; i < lc; ++i) c[i] = std::max(0.0L, ra[i] * scale);

  fftwl_destroy_plan(pf_a);
  fftwl_destroy_plan(pf_b);
  fftwl_destroy_plan(pb);
  fftwl_free(ra);
  fftwl_free(rb);
  fftwl_free(fa);
  fftwl_free(fb);
  return c;
}

}  // namespace

std::vector<long double> convolve_float(const std::vector<long double>& a,
                                        const std::vector<long double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t la = a.size(), lb = b.size(), lc = la + lb - 1;
  if (la * lb <= (std::size_t{1} << 22)) {
    std::vector<long double> c(lc, 0.0L);
    for (std::size_t i = 0; i < la; ++i) {
      if (a[i] == 0.0L) continue;
      for (std::size_t j = 0; j < lb; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  }
  return convolve_float_fft(a, b);
}

ExactPmf convolve(const ExactPmf& x, const ExactPmf& y, const PmfOptions& opt) {
  const std::size_t lc = x.points() + y.points() - 1;
  check_budget(lc, opt, "convolve");
  if (x.mode != y.mode)
    throw std::logic_error("convolve: mixed pmf arithmetic modes");

  ExactPmf out;
  out.level = x.level;  // caller fixes level semantics
  out.offset = x.offset + y.offset;
  out.mode = x.mode;
  if (x.mode == PmfMode::rational) {
    out.denom_log2 = x.denom_log2 + y.denom_log2;
    out.num = convolve_exact(x.num, y.num);
  } else {
    out.mass = convolve_float(x.mass, y.mass);
  }
  return out;
}

ExactPmf convolve_power(const ExactPmf& p, int k, const PmfOptions& opt) {
  if (k < 1) throw std::invalid_argument("convolve_power: k must be >= 1");
  ExactPmf base = p;
  ExactPmf acc;
  bool have_acc = false;
  int rem = k;
  while (true) {
    if (rem & 1) {
      acc = have_acc ? convolve(acc, base, opt) : base;
      have_acc = true;
    }
    rem >>= 1;
    if (rem == 0) break;
    base = convolve(base, base, opt);
  }
  return acc;
}

}  // namespace eitlab::spin_tree
