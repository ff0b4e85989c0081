// End-to-end acceptance gate: every release-blocking property on one screen,
// one line per check, nonzero exit when anything fails.  Each check pins its
// own parameters and tolerances; nothing here adapts to the data.
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eitlab/csv.hpp"
#include "eitlab/eit_paths.hpp"
#include "eitlab/errors.hpp"
#include "eitlab/network_flows.hpp"
#include "eitlab/percolation.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/spin_tree.hpp"
#include "eitlab/stats.hpp"
#include "eitlab/walk.hpp"

using namespace eitlab;
using std::chrono::steady_clock;

namespace {

using Detail = std::string;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const std::vector<SpinParams> kParamGrid{{2, 1}, {3, 1}, {3, 2}, {4, 1}};

// ---------------------------------------------------------------- check 1
// exhaustive ground truth: assign every fresh vertex of the depth-N tree a
// sign, walk the whole tree per assignment, histogram the leaf sums, and
// demand exact rational agreement with the folded pmf
bool exact_pmf_vs_enumeration(Detail& detail) {
  const SpinParams P{2, 1};
  for (int N = 0; N <= 3; ++N) {
    // count fresh vertices: one per internal vertex per fresh child
    std::size_t internal = 0, pw = 1;
    for (int t = 0; t < N; ++t) {
      internal += pw;
      pw *= static_cast<std::size_t>(P.branching());
    }
    const std::size_t F = internal * static_cast<std::size_t>(P.fresh);
    std::map<long long, unsigned long long> hist;

    std::vector<int> bits(F, 1);
    for (std::uint64_t mask = 0; mask < (1ull << F); ++mask) {
      for (std::size_t i = 0; i < F; ++i) bits[i] = (mask >> i) & 1 ? 1 : -1;
      std::size_t next = 0;
      long long sum = 0;
      const std::function<void(int, int)> walk_tree = [&](int spin, int depth) {
        if (depth == N) {
          sum += spin;
          return;
        }
        for (int c = 0; c < P.branching(); ++c)
          walk_tree(c < P.copy ? spin : bits[next++], depth + 1);
      };
      walk_tree(1, 0);
      ++hist[sum];
    }

    const auto pmf = spin_tree::exact_pmf(P, N);
    if (pmf.mode != spin_tree::PmfMode::rational) {
      detail = "level " + std::to_string(N) + " not rational";
      return false;
    }
    unsigned long long covered = 0;
    for (std::size_t i = 0; i < pmf.points(); ++i) {
      const long long x = pmf.x_at(i);
      const auto it = hist.find(x);
      const mpz_class want = it == hist.end() ? 0 : mpz_class(std::to_string(it->second));
      // num/2^denom == count/2^F, cross-multiplied
      mpz_class lhs = pmf.num[i] << F;
      mpz_class rhs = want << pmf.denom_log2;
      if (lhs != rhs) {
        detail = "level " + std::to_string(N) + " x=" + std::to_string(x) +
                 " pmf disagrees with enumeration";
        return false;
      }
      if (it != hist.end()) ++covered;
    }
    if (covered != hist.size()) {
      detail = "level " + std::to_string(N) + " support points missing from pmf";
      return false;
    }
  }
  detail = "levels 0..3, all masses equal as exact rationals";
  return true;
}

// ---------------------------------------------------------------- check 2
bool concentration_under_constant(Detail& detail) {
  double worst = 0.0;
  for (const auto& P : kParamGrid) {
    const auto rep = spin_tree::verify_concentration(P, 8);
    if (!rep.all_within) {
      detail = "violation at copy=" + std::to_string(P.copy) +
               " fresh=" + std::to_string(P.fresh);
      return false;
    }
    for (const auto& row : rep.rows) worst = std::max(worst, row.ratio / rep.constant);
  }
  detail = "4 parameter sets, levels 0..8, worst ratio/constant " + fmt("%.3f", worst);
  return true;
}

// ---------------------------------------------------------------- check 3
bool charfn_matches_product(Detail& detail) {
  double worst = 0.0;
  for (std::size_t pi = 0; pi < kParamGrid.size(); ++pi) {
    const auto& P = kParamGrid[pi];
    for (int N = 0; N <= 6; ++N) {
      const auto pmf = spin_tree::exact_pmf(P, N);
      for (int j = 0; j < 100; ++j) {
        const double lam =
            (rng::u01(rng::hash3(2026, pi, static_cast<std::uint64_t>(N), j)) * 2 - 1) *
            3.14159265358979323846;
        std::complex<long double> acc{0, 0};
        for (std::size_t i = 0; i < pmf.points(); ++i) {
          const long double m = pmf.mass_ld(i);
          const long double a = static_cast<long double>(lam) * pmf.x_at(i);
          acc += m * std::complex<long double>(std::cos(a), std::sin(a));
        }
        const double direct = static_cast<double>(std::abs(acc));
        const double prod = spin_tree::charfn_abs(P, N, lam);
        const double diff = std::abs(direct - prod);
        worst = std::max(worst, diff);
        if (diff > 1e-10) {
          detail = "copy=" + std::to_string(P.copy) + " level " + std::to_string(N) +
                   " lambda=" + fmt("%.6f", lam) + " diff " + fmt("%.2e", diff);
          return false;
        }
      }
    }
  }
  detail = "100 frequencies per (params, level<=6), worst |direct - product| " +
           fmt("%.1e", worst);
  return true;
}

// ---------------------------------------------------------------- check 4
bool mean_equals_copy_power(Detail& detail) {
  int exact_checked = 0, float_checked = 0;
  for (const auto& P : kParamGrid) {
    for (int N = 0; N <= 8; ++N) {
      const auto pmf = spin_tree::exact_pmf(P, N);
      mpz_class target = 1;
      for (int t = 0; t < N; ++t) target *= P.copy;
      if (pmf.mode == spin_tree::PmfMode::rational) {
        mpz_class sum = 0;
        for (std::size_t i = 0; i < pmf.points(); ++i)
          sum += pmf.num[i] * static_cast<long>(pmf.x_at(i));
        if (sum != target << pmf.denom_log2) {
          detail = "rational mean off at copy=" + std::to_string(P.copy) +
                   " level " + std::to_string(N);
          return false;
        }
        ++exact_checked;
      } else {
        const long double want = target.get_d();
        const long double got = pmf.mean_ld();
        if (std::abs(static_cast<double>((got - want) / want)) > 1e-9) {
          detail = "float mean off at copy=" + std::to_string(P.copy) + " level " +
                   std::to_string(N);
          return false;
        }
        ++float_checked;
      }
    }
  }
  detail = std::to_string(exact_checked) + " exact means equal, " +
           std::to_string(float_checked) + " float means within 1e-9 relative";
  return true;
}

// ---------------------------------------------------------------- check 5
bool conditional_profile_bound(Detail& detail) {
  const SpinParams P{2, 1};
  int checked = 0;
  double closest = 1e9;
  for (int n = 0; n <= 20; ++n) {
    for (int k = 3; k <= 7; ++k) {
      walk::ProfileEstimate est;
      try {
        est = walk::exact_conditional_profile(P, 3, n, k);
      } catch (const std::invalid_argument&) {
        if (n == 0) continue;  // empty history may be rejected; nonempty may not
        detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " rejected";
        return false;
      }
      if (!(est.value <= est.bound) || est.flagged) {
        detail = "exceeded at n=" + std::to_string(n) + " k=" + std::to_string(k) +
                 ": " + fmt("%.6f", est.value) + " > " + fmt("%.6f", est.bound);
        return false;
      }
      closest = std::min(closest, est.bound - est.value);
      ++checked;
    }
  }
  detail = std::to_string(checked) + " (history, lag) pairs, smallest margin " +
           fmt("%.4f", closest);
  return true;
}

// ---------------------------------------------------------------- check 6
bool sampled_concentration(Detail& detail) {
  const std::vector<long long> ks{4, 16, 64, 256, 1024};
  const auto ests = walk::unconditional_concentration({3, 1}, 2026, ks, 100000);
  for (const auto& e : ests) {
    const double se = e.ci_halfwidth / 1.959963984540054;
    if (e.value > e.bound + 3 * se) {
      detail = "k=" + std::to_string(e.k) + " estimate " + fmt("%.5f", e.value) +
               " above bound " + fmt("%.5f", e.bound);
      return false;
    }
  }

  const auto srw = walk::srw_concentration(2027, ks, 100000);
  std::vector<double> scaled;
  for (const auto& e : srw)
    scaled.push_back(e.value * std::sqrt(static_cast<double>(e.k)));
  const double mid = stats::mean_se(scaled).mean;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    if (std::abs(scaled[i] - mid) > 0.20 * mid) {
      detail = "srw scaling unstable at k=" + std::to_string(ks[i]) + ": " +
               fmt("%.4f", scaled[i]) + " vs mean " + fmt("%.4f", mid);
      return false;
    }
  }
  detail = "tree walk under bound at 5 lags; srw max-mass * sqrt(k) within 20% of " +
           fmt("%.4f", mid);
  return true;
}

// ---------------------------------------------------------------- check 7
bool collision_tails(Detail& detail) {
  const paths::PathMeasureSpec z3{paths::MeasureKind::z3_unpredictable, 3, {3, 1}, 7};
  const auto fz = paths::tail_fit(z3, 2048, 100000);
  if (fz.degenerate || fz.nonexponential || !(fz.theta_hi < 0.95)) {
    detail = "tree measure: theta_hi " + fmt("%.4f", fz.theta_hi) +
             (fz.nonexponential ? " flagged nonexponential" : "");
    return false;
  }

  const paths::PathMeasureSpec u3{paths::MeasureKind::uniform, 3, {}, 7};
  const auto fu3 = paths::tail_fit(u3, 2048, 100000);
  if (!fu3.nonexponential) {
    detail = "recurrent d=3 control escaped the nonexponential flag (drift " +
             fmt("%+.4f", fu3.theta_drift) + ")";
    return false;
  }

  const paths::PathMeasureSpec u4{paths::MeasureKind::uniform, 4, {}, 11};
  const auto fu4 = paths::tail_fit(u4, 512, 20000);
  const auto ret = paths::theta_d_estimate(4, 7, 2000, 10000);
  if (fu4.nonexponential || !(fu4.theta_hi < 1.0)) {
    detail = "d=4 fit not geometric";
    return false;
  }
  if (!(fu4.theta_lo <= ret.hi && ret.lo <= fu4.theta_hi)) {
    detail = "d=4 fit CI [" + fmt("%.4f", fu4.theta_lo) + "," + fmt("%.4f", fu4.theta_hi) +
             "] disjoint from return CI [" + fmt("%.4f", ret.lo) + "," +
             fmt("%.4f", ret.hi) + "]";
    return false;
  }
  detail = "tree theta_hi " + fmt("%.4f", fz.theta_hi) + " < 0.95; d=3 flagged (drift " +
           fmt("%+.3f", fu3.theta_drift) + "); d=4 theta " + fmt("%.4f", fu4.theta_hat) +
           " consistent with return estimate";
  return true;
}

// shared state between checks 8 and 9: same replicas, same flows
struct FlowBatch {
  double theta = 0.0, c = 0.0, p = 0.95;
  int n = 20;
  std::size_t samples = 256;
  std::uint64_t seed = 11;
  std::vector<flows::FlowAssignment> flows;
  std::vector<double> zs;  // estimate_ZN, computed independently of the flows
  bool strength_identical = true;
};

FlowBatch run_flow_batch(const std::map<std::string, double>& frozen) {
  FlowBatch b;
  b.theta = frozen.at("theta_z3");
  b.c = frozen.at("c_major_z3");
  paths::PathMeasureSpec spec{paths::MeasureKind::z3_unpredictable, 3, {3, 1}, 0};
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const auto pc = perc::sample_config(3, b.n, b.p, true, perc::PercMode::bond,
                                        rng::subseed(b.seed, rng::tag::kReplica, rep));
    auto draw = spec;
    draw.seed = rng::subseed(b.seed, rng::tag::kSample, rep);
    b.flows.push_back(flows::build_flow(pc, draw, b.n, b.samples));
    b.zs.push_back(flows::estimate_ZN(pc, draw, b.n, b.samples));
    if (b.flows.back().strength != b.zs.back()) b.strength_identical = false;
  }
  return b;
}

// ---------------------------------------------------------------- check 8
bool flow_moments(const FlowBatch& b, Detail& detail) {
  std::vector<double> zs, z2s, es;
  std::size_t positive = 0;
  for (const auto& f : b.flows) {
    double energy = 0;
    for (const auto& e : f.edges) energy += e.value * e.value;
    zs.push_back(f.strength);
    z2s.push_back(f.strength * f.strength);
    es.push_back(energy);
    if (f.strength > 0) ++positive;
  }
  const auto mz = stats::mean_se(zs);
  const auto mz2 = stats::mean_se(z2s);
  const auto me = stats::mean_se(es);
  const double q = b.theta / b.p;
  const double second_bound = b.c / (1 - q);
  const double energy_bound = b.c * q / ((1 - q) * (1 - q));
  const double survival_bound = (1 - q) / b.c;
  const double frac = static_cast<double>(positive) / static_cast<double>(b.flows.size());
  const double frac_se = std::sqrt(frac * (1 - frac) / static_cast<double>(b.flows.size()));

  if (std::abs(mz.mean - 1.0) > 3 * mz.se) {
    detail = "mean strength " + fmt("%.4f", mz.mean) + " +- " + fmt("%.4f", mz.se) +
             " excludes 1";
    return false;
  }
  if (mz2.mean > second_bound + 3 * mz2.se) {
    detail = "second moment " + fmt("%.3f", mz2.mean) + " above " + fmt("%.3f", second_bound);
    return false;
  }
  if (me.mean > energy_bound + 3 * me.se) {
    detail = "energy " + fmt("%.3f", me.mean) + " above " + fmt("%.3f", energy_bound);
    return false;
  }
  if (frac < survival_bound - 3 * frac_se) {
    detail = "survival " + fmt("%.3f", frac) + " below " + fmt("%.4f", survival_bound);
    return false;
  }
  detail = "1000 replicas: mean " + fmt("%.3f", mz.mean) + "+-" + fmt("%.3f", mz.se) +
           ", square " + fmt("%.2f", mz2.mean) + " <= " + fmt("%.1f", second_bound) +
           ", energy " + fmt("%.1f", me.mean) + " <= " + fmt("%.1f", energy_bound) +
           ", survival " + fmt("%.3f", frac) + " >= " + fmt("%.3f", survival_bound);
  return true;
}

// ---------------------------------------------------------------- check 9
bool flow_correctness(const FlowBatch& b, Detail& detail) {
  if (!b.strength_identical) {
    detail = "flow strength differs from the direct estimator";
    return false;
  }
  double worst_defect = 0.0, worst_gap = 0.0;
  std::size_t live = 0;
  const std::vector<int> origin(3, 0);
  for (std::size_t rep = 0; rep < b.flows.size(); ++rep) {
    const auto& f = b.flows[rep];
    const double defect = flows::conservation_defect(f);
    worst_defect = std::max(worst_defect, defect);
    if (defect >= 1e-9) {
      detail = "conservation defect " + fmt("%.2e", defect) + " at replica " +
               std::to_string(rep);
      return false;
    }
    if (f.strength <= 0) continue;
    ++live;
    const auto pc = perc::sample_config(3, b.n, b.p, true, perc::PercMode::bond,
                                        rng::subseed(b.seed, rng::tag::kReplica, rep));
    const auto g = perc::oriented_cluster(pc, origin);
    const double r = flows::effective_resistance(g, 0, flows::depth_sinks(g, b.n));
    double energy = 0;
    for (const auto& e : f.edges) energy += e.value * e.value;
    const double proxy = energy / (f.strength * f.strength);
    if (r > proxy + 1e-9) {
      detail = "replica " + std::to_string(rep) + ": cluster resistance " +
               fmt("%.4f", r) + " above energy/strength^2 " + fmt("%.4f", proxy);
      return false;
    }
    worst_gap = std::max(worst_gap, r / proxy);
  }
  detail = "strengths bit-identical; worst defect " + fmt("%.1e", worst_defect) + "; " +
           std::to_string(live) + " live clusters all satisfy R <= E/Z^2 (tightest ratio " +
           fmt("%.3f", worst_gap) + ")";
  return true;
}

// ---------------------------------------------------------------- check 10
// independent oracle: dense Gaussian elimination on the grounded Laplacian,
// restricted to the component of the source with sinks collapsed
double dense_resistance(int nv, const std::vector<std::pair<int, int>>& edges, int v0,
                        const std::vector<int>& sinks) {
  std::vector<char> sink(nv, 0);
  for (int s : sinks) sink[s] = 1;
  if (sink[v0]) return 0.0;
  std::vector<char> seen(nv, 0);
  std::vector<int> stack{v0};
  seen[v0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (sink[u]) continue;  // grounded: current may leave here
    for (const auto& [a, c] : edges) {
      if (a == u && !seen[c]) seen[c] = 1, stack.push_back(c);
      if (c == u && !seen[a]) seen[a] = 1, stack.push_back(a);
    }
  }
  bool grounded = false;
  for (int s : sinks) grounded = grounded || seen[s];
  if (!grounded) return std::numeric_limits<double>::infinity();

  std::vector<int> id(nv, -1);
  std::vector<int> free_list;
  for (int v = 0; v < nv; ++v)
    if (seen[v] && !sink[v]) {
      id[v] = static_cast<int>(free_list.size());
      free_list.push_back(v);
    }
  const int m = static_cast<int>(free_list.size());
  std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
  for (const auto& [a, c] : edges) {
    if (!seen[a] || !seen[c]) continue;
    const int ia = id[a], ic = id[c];
    if (ia >= 0) A[ia][ia] += 1.0;
    if (ic >= 0) A[ic][ic] += 1.0;
    if (ia >= 0 && ic >= 0) A[ia][ic] -= 1.0, A[ic][ia] -= 1.0;
  }
  A[id[v0]][m] = 1.0;
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int rr = col + 1; rr < m; ++rr)
      if (std::abs(A[rr][col]) > std::abs(A[piv][col])) piv = rr;
    std::swap(A[col], A[piv]);
    if (std::abs(A[col][col]) < 1e-12) return std::numeric_limits<double>::infinity();
    for (int rr = 0; rr < m; ++rr) {
      if (rr == col) continue;
      const double fac = A[rr][col] / A[col][col];
      for (int cc = col; cc <= m; ++cc) A[rr][cc] -= fac * A[col][cc];
    }
  }
  return A[id[v0]][m] / A[id[v0]][id[v0]];
}

perc::ClusterGraph as_graph(int nv, const std::vector<std::pair<int, int>>& edges) {
  perc::ClusterGraph g;
  for (int v = 0; v < nv; ++v) g.vertices.push_back({v});
  g.edges = edges;
  return g;
}

bool resistance_solver_oracles(Detail& detail) {
  double worst = 0.0;
  int finite_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t h = rng::hash2(404, trial, 0);
    const int nv = 3 + static_cast<int>(rng::uniform_below(h, 10));
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < nv; ++v) {
      const int u = static_cast<int>(rng::uniform_below(rng::hash3(405, trial, v, 0),
                                                        static_cast<std::uint32_t>(v)));
      edges.push_back({u, v});
    }
    const int extra = static_cast<int>(rng::uniform_below(rng::hash2(406, trial, 0),
                                                          static_cast<std::uint32_t>(nv)));
    for (int j = 0; j < extra; ++j) {
      const int a = static_cast<int>(rng::uniform_below(rng::hash3(407, trial, j, 0),
                                                        static_cast<std::uint32_t>(nv)));
      const int bb = static_cast<int>(rng::uniform_below(rng::hash3(407, trial, j, 1),
                                                         static_cast<std::uint32_t>(nv)));
      if (a != bb) edges.push_back({a, bb});
    }
    const int nsinks = 1 + static_cast<int>(rng::uniform_below(rng::hash2(408, trial, 0), 3));
    std::set<int> sinkset;
    for (int j = 0; j < nsinks; ++j)
      sinkset.insert(1 + static_cast<int>(rng::uniform_below(
                             rng::hash3(409, trial, j, 0), static_cast<std::uint32_t>(nv - 1))));
    const std::vector<int> sinks(sinkset.begin(), sinkset.end());

    const double got = flows::effective_resistance(as_graph(nv, edges), 0, sinks);
    const double want = dense_resistance(nv, edges, 0, sinks);
    if (std::isinf(want) != std::isinf(got)) {
      detail = "trial " + std::to_string(trial) + " reachability disagrees";
      return false;
    }
    if (std::isfinite(want)) {
      ++finite_cases;
      worst = std::max(worst, std::abs(got - want));
      if (std::abs(got - want) > 1e-9) {
        detail = "trial " + std::to_string(trial) + " |cg - dense| = " +
                 fmt("%.2e", std::abs(got - want));
        return false;
      }
    }
  }

  // closed forms: a path of k unit resistors reads k end to end, m parallel
  // edges read 1/m, and a 2-bank in series with a 3-bank reads 1/2 + 1/3
  for (int k = 1; k <= 12; ++k) {
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v < k; ++v) e.push_back({v, v + 1});
    const double r = flows::effective_resistance(as_graph(k + 1, e), 0, {k});
    if (std::abs(r - k) > 1e-12) {
      detail = "path of " + std::to_string(k) + " edges read " + fmt("%.15f", r);
      return false;
    }
  }
  for (int m = 2; m <= 8; ++m) {
    std::vector<std::pair<int, int>> e(static_cast<std::size_t>(m), {0, 1});
    const double r = flows::effective_resistance(as_graph(2, e), 0, {1});
    if (std::abs(r - 1.0 / m) > 1e-12) {
      detail = std::to_string(m) + " parallel edges read " + fmt("%.15f", r);
      return false;
    }
  }
  {
    std::vector<std::pair<int, int>> e{{0, 1}, {0, 1}, {1, 2}, {1, 2}, {1, 2}};
    const double r = flows::effective_resistance(as_graph(3, e), 0, {2});
    if (std::abs(r - (0.5 + 1.0 / 3)) > 1e-12) {
      detail = "series-parallel composite read " + fmt("%.15f", r);
      return false;
    }
  }

  // monotonicity: wiring in one more unit resistor can only help the current
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t h = rng::hash2(410, trial, 0);
    const int nv = 3 + static_cast<int>(rng::uniform_below(h, 8));
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < nv; ++v)
      edges.push_back({static_cast<int>(rng::uniform_below(
                           rng::hash3(411, trial, v, 0), static_cast<std::uint32_t>(v))),
                       v});
    const std::vector<int> sinks{nv - 1};
    const double before = flows::effective_resistance(as_graph(nv, edges), 0, sinks);
    const int a = static_cast<int>(rng::uniform_below(rng::hash3(412, trial, 0, 0),
                                                      static_cast<std::uint32_t>(nv)));
    const int bb = static_cast<int>(rng::uniform_below(rng::hash3(412, trial, 1, 0),
                                                       static_cast<std::uint32_t>(nv)));
    if (a == bb) continue;
    auto more = edges;
    more.push_back({a, bb});
    const double after = flows::effective_resistance(as_graph(nv, more), 0, sinks);
    if (after > before + 1e-9) {
      detail = "adding an edge raised resistance " + fmt("%.6f", before) + " -> " +
               fmt("%.6f", after);
      return false;
    }
  }
  detail = std::to_string(finite_cases) +
           " random graphs vs dense elimination (worst gap " + fmt("%.1e", worst) +
           "), closed forms exact, 1000 monotonicity trials";
  return true;
}

// ---------------------------------------------------------------- check 11
bool resistance_growth(const std::map<std::string, double>& frozen, Detail& detail) {
  const double theta = frozen.at("theta_z3");

  const auto full = flows::resistance_growth_profile(3, 1.0, theta, {4, 8, 16}, 1, 1);
  const double step1 = full.median_r[1] - full.median_r[0];
  const double step2 = full.median_r[2] - full.median_r[1];
  if (!(step1 > step2) || !full.decreasing_increments) {
    detail = "full lattice doubling steps not decreasing: " + fmt("%.4f", step1) +
             " then " + fmt("%.4f", step2);
    return false;
  }

  const auto chain = flows::resistance_growth_profile(1, 1.0, theta, {2, 4, 6}, 1, 1);
  if (std::abs(chain.increments[0] - chain.increments[1]) > 1e-12 ||
      std::abs(chain.increments[0] - 1.0) > 1e-12) {
    detail = "chain increments not constant unit";
    return false;
  }

  const auto diluted =
      flows::resistance_growth_profile(3, 0.95, theta, {4, 8, 16}, 50, 20260822);
  const std::array<const char*, 3> names{"resist_r4", "resist_r8", "resist_r16"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double want = frozen.at(names[i]);
    if (std::abs(diluted.median_r[i] - want) > 0.10 * want) {
      detail = std::string(names[i]) + " drifted: " + fmt("%.6f", diluted.median_r[i]) +
               " vs frozen " + fmt("%.6f", want);
      return false;
    }
  }
  detail = "full-lattice steps " + fmt("%.4f", step1) + " > " + fmt("%.4f", step2) +
           "; chain flat; diluted medians within 10% of frozen";
  return true;
}

// ---------------------------------------------------------------- check 12
// two-sample chi-square on 4-step window histograms (16 cells); with equal
// sample counts the statistic reduces to sum (a-b)^2/(a+b)
std::array<std::uint64_t, 16> window_hist(std::uint64_t salt, std::size_t shift,
                                          bool flip) {
  std::array<std::uint64_t, 16> h{};
  const SpinParams P{3, 1};
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const auto path =
        walk::sample_stationary(P, rng::subseed(2028, salt, i), shift + 4);
    unsigned cell = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      int step = path.steps[shift + j];
      if (flip) step = -step;
      cell = cell * 2 + (step > 0 ? 1u : 0u);
    }
    ++h[cell];
  }
  return h;
}

double chi_square_16(const std::array<std::uint64_t, 16>& a,
                     const std::array<std::uint64_t, 16>& b) {
  double stat = 0.0;
  for (std::size_t c = 0; c < 16; ++c) {
    const double s = static_cast<double>(a[c] + b[c]);
    if (s == 0) continue;
    const double d = static_cast<double>(a[c]) - static_cast<double>(b[c]);
    stat += d * d / s;
  }
  return stat;
}

bool stationary_windows(Detail& detail) {
  const double kCut = 30.5779;  // chi-square, 15 df, upper 1% point
  const auto base = window_hist(0, 0, false);
  const auto s17 = window_hist(1, 17, false);
  const auto s1000 = window_hist(2, 1000, false);
  const auto flipped = window_hist(3, 0, true);

  const double c17 = chi_square_16(base, s17);
  const double c1000 = chi_square_16(base, s1000);
  const double cflip = chi_square_16(base, flipped);
  if (c17 > kCut || c1000 > kCut || cflip > kCut) {
    detail = "chi2 shift17 " + fmt("%.1f", c17) + ", shift1000 " + fmt("%.1f", c1000) +
             ", sign-flip " + fmt("%.1f", cflip) + " vs cut " + fmt("%.1f", kCut);
    return false;
  }
  detail = "chi2 " + fmt("%.1f", c17) + " / " + fmt("%.1f", c1000) + " / " +
           fmt("%.1f", cflip) + " all under " + fmt("%.1f", kCut);
  return true;
}

// ---------------------------------------------------------------- check 13
bool cli_determinism(Detail& detail) {
  namespace fs = std::filesystem;
  const std::string src = EITLAB_SRC;
  const std::string bin = EITLAB_BIN;
  std::vector<std::string> configs;
  for (const auto& entry : fs::directory_iterator(src + "/configs"))
    if (entry.path().extension() == ".cfg") configs.push_back(entry.path().string());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    detail = "no config files found";
    return false;
  }

  char tmpl_a[] = "/tmp/eitlab_acc_a_XXXXXX";
  char tmpl_b[] = "/tmp/eitlab_acc_b_XXXXXX";
  const char* da = mkdtemp(tmpl_a);
  const char* db = mkdtemp(tmpl_b);
  if (!da || !db) {
    detail = "mkdtemp failed";
    return false;
  }

  for (const auto& cfgp : configs) {
    const auto out_name = csvio::resolve_config(csvio::parse_config(cfgp)).at("out");
    for (const std::string dir : {da, db}) {
      const std::string cmd = "cd '" + dir + "' && EITLAB_OUT='" + dir +
                              "' EITLAB_DATA='" + src + "/data' '" + bin + "' run '" +
                              cfgp + "' > /dev/null 2> run_err.txt";
      const int raw = std::system(cmd.c_str());
      const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
      if (code != 0) {
        detail = fs::path(cfgp).filename().string() + " exited " + std::to_string(code);
        return false;
      }
    }
    const auto ba = csvio::comparable_bytes(std::string(da) + "/" + out_name);
    const auto bb = csvio::comparable_bytes(std::string(db) + "/" + out_name);
    if (ba != bb) {
      detail = fs::path(cfgp).filename().string() + " bodies differ between runs";
      return false;
    }
    const auto complaint = csvio::validate_file(std::string(da) + "/" + out_name);
    if (!complaint.empty()) {
      detail = out_name + ": " + complaint;
      return false;
    }
  }
  detail = std::to_string(configs.size()) +
           " configs run twice, byte-identical outside the timestamp, all valid";
  return true;
}

}  // namespace

int main() {
  const auto frozen =
      csvio::read_constants(std::string(EITLAB_SRC) + "/data/frozen_constants.txt");

  int failures = 0;
  int idx = 0;
  const auto report = [&](const char* name, const std::function<bool(Detail&)>& fn) {
    ++idx;
    Detail detail;
    const auto t0 = steady_clock::now();
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-52s %6.1fs  %s\n", ok ? "PASS" : "FAIL", idx, name, secs,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };

  report("exact pmf equals exhaustive spin enumeration", exact_pmf_vs_enumeration);
  report("scaled max mass stays under the concentration constant",
         concentration_under_constant);
  report("characteristic function matches the generation product", charfn_matches_product);
  report("pmf mean equals copy^level", mean_equals_copy_power);
  report("conditional prediction profile respects the lag bound",
         conditional_profile_bound);
  report("sampled concentration bounded; srw baseline scales as sqrt k",
         sampled_concentration);
  report("collision tails: geometric for the tree measure, drifting for d=3",
         collision_tails);

  FlowBatch batch;
  report("detached-measure flow moments and energy at p=0.95", [&](Detail& d) {
    batch = run_flow_batch(frozen);
    return flow_moments(batch, d);
  });
  report("flows conserve, match the estimator, dominate cluster resistance",
         [&](Detail& d) { return flow_correctness(batch, d); });
  report("resistance solver agrees with dense elimination and closed forms",
         resistance_solver_oracles);
  report("resistance growth flattens on the lattice, pinned when diluted",
         [&](Detail& d) { return resistance_growth(frozen, d); });
  report("stationary windows pass shift and sign-flip chi-square", stationary_windows);
  report("repeated runs are byte-identical outside the timestamp", cli_determinism);

  std::printf("%d of %d checks passed\n", idx - failures, idx);
  return failures == 0 ? 0 : 1;
}
