#include "eitlab/network_flows.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/stats.hpp"
#include "eitlab/walk.hpp"

namespace eitlab::flows {

namespace {

constexpr std::uint64_t kExactSupportCap = 100'000;
constexpr int kMaxEnumSlots = 20;

void validate_flow_inputs(const perc::PercConfig& cfg,
                          const paths::PathMeasureSpec& spec, int n,
                          std::size_t path_samples) {
  spec.validate();
  if (!cfg.oriented || cfg.mode != perc::PercMode::bond)
    throw std::invalid_argument("flow: config must be oriented bond percolation");
  if (cfg.dimension != spec.dimension)
    throw std::invalid_argument("flow: config and measure dimensions differ");
  if (n < 1 || n > cfg.extent)
    throw std::invalid_argument("flow: depth must be in [1, box depth]");
  if (!(cfg.p > 0.0 && cfg.p <= 1.0))
    throw std::invalid_argument("flow: config retention out of range");
  if (path_samples < 100)
    throw std::invalid_argument("flow: need at least 10^2 path samples");
}

// walks the first n steps; false as soon as a closed edge is hit.  when
// touched is given, records (open-bit index, tail coordinates) per step
template <class AxisFn>
bool eval_path(const perc::PercConfig& cfg, int n, AxisFn&& axis_at,
               std::vector<std::pair<std::uint64_t, std::vector<int>>>* touched) {
  std::vector<int> pos(static_cast<std::size_t>(cfg.dimension), 0);
  for (int t = 0; t < n; ++t) {
    const int axis = axis_at(t);
    const std::uint64_t bit =
        perc::vertex_rank(cfg, pos) * static_cast<std::uint64_t>(cfg.dimension) +
        static_cast<std::uint64_t>(axis);
    if (!cfg.bit(bit)) return false;
    if (touched) touched->emplace_back(bit, pos);
    ++pos[static_cast<std::size_t>(axis)];
  }
  return true;
}

// distribution of 0/1 increment strings of one driving walk's half
// coordinate, by enumerating every assignment of the touched fresh slots
struct PrefixDist {
  std::vector<std::pair<std::uint64_t, double>> atoms;  // packed bits, mass
  bool feasible = false;
};

PrefixDist half_coordinate_prefixes(const SpinParams& params, int m) {
  PrefixDist out;
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> slot_of;
  std::vector<int> leaf_slot(static_cast<std::size_t>(m), -1);
  for (int t = 1; t <= m; ++t) {
    const auto slot = walk::fresh_ancestor(params, static_cast<std::uint64_t>(t));
    if (!slot) continue;  // copy chain: spin +1, increment 1
    const auto [it, fresh] = slot_of.emplace(*slot, static_cast<int>(slot_of.size()));
    leaf_slot[static_cast<std::size_t>(t - 1)] = it->second;
  }
  const int nslots = static_cast<int>(slot_of.size());
  if (nslots > kMaxEnumSlots) return out;

  const double mass = std::ldexp(1.0, -nslots);
  std::unordered_map<std::uint64_t, double> agg;
  for (std::uint64_t a = 0; a < (1ull << nslots); ++a) {
    std::uint64_t bits = 0;
    for (int t = 0; t < m; ++t) {
      const int s = leaf_slot[static_cast<std::size_t>(t)];
      const bool up = s < 0 || ((a >> s) & 1);  // +1 spin -> increment 1
      if (up) bits |= 1ull << t;
    }
    agg[bits] += mass;
  }
  out.atoms.assign(agg.begin(), agg.end());
  std::sort(out.atoms.begin(), out.atoms.end());  // deterministic order
  out.feasible = true;
  return out;
}

struct PathRun {
  double open_mass = 0.0;  // mu-mass (exact) or fraction (Monte Carlo)
  std::size_t paths = 0;
  bool exact = false;
  // per touched open edge: accumulated mass and tail coordinates
  std::unordered_map<std::uint64_t, std::pair<double, std::vector<int>>> edge_mass;
};

void commit(PathRun& run, double mass,
            const std::vector<std::pair<std::uint64_t, std::vector<int>>>& touched,
            bool collect) {
  run.open_mass += mass;
  if (!collect) return;
  for (const auto& [bit, tail] : touched) {
    auto& slot = run.edge_mass[bit];
    if (slot.second.empty()) slot.second = tail;
    slot.first += mass;
  }
}

// support size of the measure at depth n, or 0 when enumeration is off the
// table; fills the prefix distributions for the z3 measure
std::uint64_t exact_support(const paths::PathMeasureSpec& spec, int n, PrefixDist& w,
                            PrefixDist& ws) {
  if (spec.kind == paths::MeasureKind::uniform) {
    std::uint64_t support = 1;
    for (int t = 0; t < n; ++t) {
      support *= static_cast<std::uint64_t>(spec.dimension);
      if (support > kExactSupportCap) return 0;
    }
    return support;
  }
  w = half_coordinate_prefixes(spec.params, n / 2);
  ws = half_coordinate_prefixes(spec.params, (n + 1) / 2);
  if (!w.feasible || !ws.feasible) return 0;
  const std::uint64_t support =
      static_cast<std::uint64_t>(w.atoms.size()) * ws.atoms.size();
  return support <= kExactSupportCap ? support : 0;
}

PathRun run_paths(const perc::PercConfig& cfg, const paths::PathMeasureSpec& spec,
                  int n, std::size_t path_samples, bool collect) {
  validate_flow_inputs(cfg, spec, n, path_samples);

  PathRun run;
  std::vector<std::pair<std::uint64_t, std::vector<int>>> touched;
  std::vector<std::pair<std::uint64_t, std::vector<int>>>* rec =
      collect ? &touched : nullptr;

  PrefixDist w, ws;
  const std::uint64_t support = exact_support(spec, n, w, ws);
  if (support > 0) {
    run.exact = true;
    run.paths = support;
    if (spec.kind == paths::MeasureKind::uniform) {
      const double mass = std::pow(static_cast<double>(spec.dimension), -n);
      std::vector<int> inc(static_cast<std::size_t>(n), 0);
      while (true) {
        touched.clear();
        if (eval_path(
                cfg, n, [&](int t) { return inc[static_cast<std::size_t>(t)]; }, rec))
          commit(run, mass, touched, collect);
        int t = n - 1;
        while (t >= 0 && inc[static_cast<std::size_t>(t)] == spec.dimension - 1)
          inc[static_cast<std::size_t>(t--)] = 0;
        if (t < 0) break;
        ++inc[static_cast<std::size_t>(t)];
      }
    } else {
      for (const auto& [wb, wm] : w.atoms) {
        for (const auto& [sb, sm] : ws.atoms) {
          touched.clear();
          const auto axis_at = [wb = wb, sb = sb](int t) {
            if (t % 2 == 0) return ((sb >> (t / 2)) & 1) ? 1 : 2;
            return ((wb >> ((t - 1) / 2)) & 1) ? 0 : 2;
          };
          if (eval_path(cfg, n, axis_at, rec)) commit(run, wm * sm, touched, collect);
        }
      }
    }
    return run;
  }

  run.paths = path_samples;
  const double mass = 1.0 / static_cast<double>(path_samples);
  paths::PathMeasureSpec draw = spec;
  for (std::uint64_t i = 0; i < path_samples; ++i) {
    draw.seed = rng::subseed(spec.seed, rng::tag::kSample, i);
    const auto path = paths::sample_oriented(draw, static_cast<std::size_t>(n));
    touched.clear();
    if (eval_path(
            cfg, n, [&](int t) { return static_cast<int>(path.increments[static_cast<std::size_t>(t)]); },
            rec))
      commit(run, mass, touched, collect);
  }
  return run;
}

double strength_of(const PathRun& run, double p, int n) {
  return std::pow(p, -n) * run.open_mass;
}

perc::PercConfig full_config(int d, int extent) {
  perc::PercConfig cfg;
  cfg.dimension = d;
  cfg.extent = extent;
  cfg.p = 1.0;
  cfg.oriented = true;
  cfg.mode = perc::PercMode::bond;
  cfg.seed = 0;
  const std::uint64_t nv = perc::box_vertex_count(d, extent, true);
  if (nv > 4'000'000)
    throw budget_error("flow: full box of " + std::to_string(nv) +
                       " vertices is over budget");
  cfg.open_bits.assign((nv * static_cast<std::uint64_t>(d) + 63) / 64, ~0ull);
  return cfg;
}

}  // namespace

double estimate_ZN(const perc::PercConfig& cfg, const paths::PathMeasureSpec& spec,
                   int n, std::size_t path_samples) {
  return strength_of(run_paths(cfg, spec, n, path_samples, false), cfg.p, n);
}

FlowAssignment build_flow(const perc::PercConfig& cfg,
                          const paths::PathMeasureSpec& spec, int n,
                          std::size_t path_samples) {
  const PathRun run = run_paths(cfg, spec, n, path_samples, true);

  FlowAssignment flow;
  flow.dimension = cfg.dimension;
  flow.depth = n;
  flow.p = cfg.p;
  flow.paths_used = run.paths;
  flow.exact_mu = run.exact;
  flow.strength = strength_of(run, cfg.p, n);

  const double scale = std::pow(cfg.p, -n);
  std::map<std::uint64_t, const std::pair<double, std::vector<int>>*> ordered;
  for (const auto& [bit, entry] : run.edge_mass) ordered.emplace(bit, &entry);
  flow.edges.reserve(ordered.size());
  for (const auto& [bit, entry] : ordered) {
    FlowEdge e;
    e.tail = entry->second;
    e.axis = static_cast<int>(bit % static_cast<std::uint64_t>(cfg.dimension));
    e.value = scale * entry->first;
    flow.edges.push_back(std::move(e));
  }
  return flow;
}

double conservation_defect(const FlowAssignment& flow) {
  std::map<std::vector<int>, double> net;
  for (const auto& e : flow.edges) {
    net[e.tail] += e.value;
    std::vector<int> head = e.tail;
    ++head[static_cast<std::size_t>(e.axis)];
    net[head] -= e.value;
  }
  double worst = 0.0;
  for (const auto& [v, f] : net) {
    long long level = 0;
    for (const int c : v) level += c;
    if (level == 0 || level == flow.depth) continue;  // source or sink shell
    worst = std::max(worst, std::abs(f));
  }
  return worst;
}

EnergyReport energy_report(const FlowAssignment& flow, double theta, double c,
                           double p) {
  if (!(theta > 0.0) || !(c > 0.0) || !(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("energy report: need theta > 0, C > 0, p in (0,1]");
  EnergyReport rep;
  rep.strength = flow.strength;
  for (const auto& e : flow.edges) rep.energy += e.value * e.value;
  rep.bound_finite = p > theta;
  if (rep.bound_finite) {
    const double q = theta / p;
    rep.bound = c * q / ((1.0 - q) * (1.0 - q));
  } else {
    rep.bound = std::numeric_limits<double>::infinity();
  }
  rep.resistance_proxy = rep.strength > 0.0
                             ? rep.energy / (rep.strength * rep.strength)
                             : std::numeric_limits<double>::infinity();
  return rep;
}

MartingaleReport martingale_check(const paths::PathMeasureSpec& spec, double p,
                                  double theta, double c,
                                  const std::vector<int>& depths,
                                  std::size_t replicas, std::size_t path_samples,
                                  std::uint64_t seed) {
  spec.validate();
  if (depths.empty()) throw std::invalid_argument("martingale: empty depth list");
  for (std::size_t i = 0; i < depths.size(); ++i)
    if (depths[i] < 1 || (i > 0 && depths[i] <= depths[i - 1]))
      throw std::invalid_argument("martingale: depths must be increasing and >= 1");
  if (replicas < 10) throw std::invalid_argument("martingale: need >= 10 replicas");
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("martingale: p must be in (0,1]");

  MartingaleReport rep;
  rep.depths = depths;
  rep.replicas = replicas;
  const int maxn = depths.back();

  std::vector<std::vector<double>> z(depths.size());
  paths::PathMeasureSpec draw = spec;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const perc::PercConfig cfg =
        p < 1.0 ? perc::sample_config(spec.dimension, maxn, p, true,
                                      perc::PercMode::bond,
                                      rng::subseed(seed, rng::tag::kReplica, r))
                : full_config(spec.dimension, maxn);
    draw.seed = rng::subseed(seed, rng::tag::kSample, r);
    for (std::size_t i = 0; i < depths.size(); ++i)
      z[i].push_back(estimate_ZN(cfg, draw, depths[i], path_samples));
  }

  rep.mean_ok = true;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const auto m = stats::mean_se(z[i]);
    rep.mean.push_back(m.mean);
    rep.mean_se.push_back(m.se);
    if (std::abs(m.mean - 1.0) > 3.0 * m.se + 1e-12) rep.mean_ok = false;

    std::vector<double> sq(z[i].size());
    for (std::size_t r = 0; r < z[i].size(); ++r) sq[r] = z[i][r] * z[i][r];
    const auto m2 = stats::mean_se(sq);
    rep.second.push_back(m2.mean);
    rep.second_se.push_back(m2.se);
  }

  rep.bound_applicable = p > theta && theta > 0.0 && c > 0.0;
  if (rep.bound_applicable) {
    rep.second_bound = c / (1.0 - theta / p);
    rep.second_ok = true;
    for (std::size_t i = 0; i < depths.size(); ++i)
      if (rep.second[i] > rep.second_bound + 3.0 * rep.second_se[i])
        rep.second_ok = false;
  } else {
    rep.second_bound = std::numeric_limits<double>::infinity();
    rep.second_ok = true;  // hypothesis fails, nothing to assert
  }

  // martingale drift: regress the step on the current value, pooled over
  // consecutive depth pairs
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = 0; i + 1 < depths.size(); ++i)
    for (std::size_t r = 0; r < replicas; ++r)
      xy.emplace_back(z[i][r], z[i + 1][r] - z[i][r]);
  double vx = 0;
  if (!xy.empty()) {
    const double mx = [&] {
      double s = 0;
      for (const auto& [x, y] : xy) s += x;
      return s / static_cast<double>(xy.size());
    }();
    for (const auto& [x, y] : xy) vx += (x - mx) * (x - mx);
  }
  if (xy.size() < 3 || vx < 1e-12) {
    rep.drift_ok = true;  // constant Z (p = 1) or nothing to regress
  } else {
    const auto fit = stats::least_squares(xy);
    rep.drift_slope = fit.slope;
    rep.drift_se = fit.slope_se;
    rep.drift_ok = std::abs(fit.slope) <= 1.959963984540054 * fit.slope_se;
  }
  return rep;
}

std::vector<int> depth_sinks(const perc::ClusterGraph& g, int n) {
  std::vector<int> sinks;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    long long level = 0;
    for (const int c : g.vertices[i]) level += c;
    if (level == n) sinks.push_back(static_cast<int>(i));
  }
  return sinks;
}

double effective_resistance(const perc::ClusterGraph& g, int v0,
                            const std::vector<int>& sinks) {
  const int nv = static_cast<int>(g.vertices.size());
  if (v0 < 0 || v0 >= nv)
    throw std::invalid_argument("resistance: source index out of range");
  std::vector<char> is_sink(static_cast<std::size_t>(nv), 0);
  for (const int s : sinks) {
    if (s < 0 || s >= nv)
      throw std::invalid_argument("resistance: sink index out of range");
    is_sink[static_cast<std::size_t>(s)] = 1;
  }
  if (sinks.empty()) return std::numeric_limits<double>::infinity();
  if (is_sink[static_cast<std::size_t>(v0)]) return 0.0;

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nv));
  for (const auto& [a, b] : g.edges) {
    if (a == b) continue;
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }

  // component of the source; grounding happens only through sinks inside it
  std::vector<int> comp(static_cast<std::size_t>(nv), -1);
  std::deque<int> queue{v0};
  comp[static_cast<std::size_t>(v0)] = 0;
  bool grounded = false;
  std::vector<int> members{v0};
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    if (is_sink[static_cast<std::size_t>(cur)]) {
      grounded = true;
      continue;  // current drains here; no need to look behind the ground
    }
    for (const int nb : adj[static_cast<std::size_t>(cur)]) {
      if (comp[static_cast<std::size_t>(nb)] >= 0) continue;
      comp[static_cast<std::size_t>(nb)] = 0;
      members.push_back(nb);
      queue.push_back(nb);
    }
  }
  if (!grounded) return std::numeric_limits<double>::infinity();

  std::vector<int> local(static_cast<std::size_t>(nv), -1);
  int nfree = 0;
  for (const int v : members)
    if (!is_sink[static_cast<std::size_t>(v)]) local[static_cast<std::size_t>(v)] = nfree++;

  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& [a, b] : g.edges) {
    if (a == b) continue;
    const int la = local[static_cast<std::size_t>(a)];
    const int lb = local[static_cast<std::size_t>(b)];
    const bool ina = comp[static_cast<std::size_t>(a)] == 0;
    const bool inb = comp[static_cast<std::size_t>(b)] == 0;
    if (!ina && !inb) continue;
    if (la >= 0) trip.emplace_back(la, la, 1.0);
    if (lb >= 0) trip.emplace_back(lb, lb, 1.0);
    if (la >= 0 && lb >= 0) {
      trip.emplace_back(la, lb, -1.0);
      trip.emplace_back(lb, la, -1.0);
    }
  }

  Eigen::SparseMatrix<double> lap(nfree, nfree);
  lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
  rhs[local[static_cast<std::size_t>(v0)]] = 1.0;

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
      solver;
  solver.setTolerance(1e-10);
  solver.setMaxIterations(50ll * nfree);
  solver.compute(lap);
  const Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(
        "resistance: conjugate gradient stalled at residual " +
        std::to_string(solver.error()) + " after " +
        std::to_string(solver.iterations()) + " iterations");
  return x[local[static_cast<std::size_t>(v0)]];
}

ResistanceProfile resistance_growth_profile(int d, double p, double theta,
                                            const std::vector<int>& radii,
                                            std::size_t replicas,
                                            std::uint64_t seed) {
  if (radii.empty()) throw std::invalid_argument("resistance profile: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] < 1 || (i > 0 && radii[i] <= radii[i - 1]))
      throw std::invalid_argument("resistance profile: radii must increase");
  if (!(p > 0.0 && p <= 1.0) || !(p > theta))
    throw std::invalid_argument("resistance profile: need theta < p <= 1");
  if (replicas < 1) throw std::invalid_argument("resistance profile: no replicas");

  ResistanceProfile prof;
  prof.radii = radii;
  prof.replicas = replicas;
  const int depth = radii.back();

  std::vector<std::vector<double>> rs(radii.size());
  const std::vector<int> origin(static_cast<std::size_t>(d), 0);
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const perc::PercConfig cfg =
        p < 1.0 ? perc::sample_config(d, depth, p, true, perc::PercMode::bond,
                                      rng::subseed(seed, rng::tag::kReplica, r))
                : full_config(d, depth);
    const auto cl = perc::oriented_cluster(cfg, origin);
    if (!cl.truncated) continue;  // died before the outer shell
    ++prof.survivors;
    for (std::size_t i = 0; i < radii.size(); ++i)
      rs[i].push_back(effective_resistance(cl, 0, depth_sinks(cl, radii[i])));
    if (p == 1.0 && replicas > 1) {
      // the full lattice is deterministic; one replica carries all information
      prof.survivors = replicas;
      for (std::size_t i = 0; i < radii.size(); ++i)
        rs[i].assign(replicas, rs[i][0]);
      break;
    }
  }

  prof.enough_survivors = prof.survivors >= 10;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& series : rs) {
    if (series.empty()) {
      prof.median_r.push_back(nan);
      continue;
    }
    std::sort(series.begin(), series.end());
    const std::size_t m = series.size();
    prof.median_r.push_back(m % 2 == 1 ? series[m / 2]
                                       : 0.5 * (series[m / 2 - 1] + series[m / 2]));
  }

  // per-unit-radius increments, so arithmetic and doubling radius lists read
  // the same way
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    prof.increments.push_back((prof.median_r[i + 1] - prof.median_r[i]) /
                              static_cast<double>(radii[i + 1] - radii[i]));

  if (prof.increments.size() < 1 || prof.survivors == 0) {
    prof.note = "insufficient data";
  } else {
    prof.decreasing_increments = true;
    for (std::size_t i = 0; i + 1 < prof.increments.size(); ++i)
      if (!(prof.increments[i + 1] < prof.increments[i] - 1e-9))
        prof.decreasing_increments = false;
    if (prof.increments.size() == 1)
      prof.decreasing_increments = false;
    prof.note = prof.decreasing_increments ? "transient-like" : "recurrent-like";
  }
  return prof;
}

}  // namespace eitlab::flows

namespace eitlab::perc {

SurvivalReport survival_lower_bound_check(const paths::PathMeasureSpec& spec, double p,
                                          double theta, double c, int n,
                                          std::size_t trials) {
  spec.validate();
  if (!(theta > 0.0 && theta < p && p <= 1.0))
    throw std::invalid_argument("survival bound: need 0 < theta < p <= 1");
  if (!(c > 0.0)) throw std::invalid_argument("survival bound: need C > 0");
  if (n < 1 || trials < 1)
    throw std::invalid_argument("survival bound: need depth and trials >= 1");

  SurvivalReport rep;
  rep.trials = trials;
  rep.bound = (1.0 - theta / p) / c;

  paths::PathMeasureSpec draw = spec;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (p == 1.0) {
      ++rep.positive;  // every path is open, Z_N = 1
      continue;
    }
    const auto cfg = sample_config(spec.dimension, n, p, true, PercMode::bond,
                                   rng::subseed(spec.seed, rng::tag::kReplica, t));
    draw.seed = rng::subseed(spec.seed, rng::tag::kSample, t);
    if (flows::estimate_ZN(cfg, draw, n, 256) > 0.0) ++rep.positive;
  }
  rep.empirical = static_cast<double>(rep.positive) / static_cast<double>(trials);
  rep.se = std::sqrt(rep.empirical * (1.0 - rep.empirical) /
                     static_cast<double>(trials));
  rep.pass = rep.empirical >= rep.bound - 3.0 * rep.se;
  return rep;
}

}  // namespace eitlab::perc
