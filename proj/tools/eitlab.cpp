#include <CLI11.hpp>
#include <cstdlib>
#include <gmpxx.h>
#include <map>
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
using Config = std::map<std::string, std::string>;

namespace {

// exit-code contract: 0 ok, 2 bad config/flags, 3 over budget, 4 failed check
constexpr int kOk = 0, kSchemaError = 2, kBudgetError = 3, kCheckFailed = 4;

std::string out_path(const Config& cfg) {
  const std::string out = cfg.at("out");
  if (!out.empty() && out.front() == '/') return out;
  if (const char* dir = std::getenv("EITLAB_OUT"))
    if (*dir) return std::string(dir) + "/" + out;
  return out;
}

long to_long(const Config& cfg, const std::string& key) {
  const std::string& v = cfg.at(key);
  std::size_t used = 0;
  long parsed = 0;
  try {
    parsed = std::stol(v, &used);
  } catch (...) {
    used = 0;
  }
  if (used != v.size())
    throw std::invalid_argument("config key '" + key + "' is not an integer: " + v);
  return parsed;
}

double to_double(const Config& cfg, const std::string& key) {
  const std::string& v = cfg.at(key);
  std::size_t used = 0;
  double parsed = 0;
  try {
    parsed = std::stod(v, &used);
  } catch (...) {
    used = 0;
  }
  if (used != v.size())
    throw std::invalid_argument("config key '" + key + "' is not a number: " + v);
  return parsed;
}

bool to_bool(const Config& cfg, const std::string& key) {
  const std::string& v = cfg.at(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "' is not true/false: " + v);
}

std::vector<int> to_int_list(const Config& cfg, const std::string& key) {
  std::vector<int> out;
  std::string item;
  std::stringstream ss(cfg.at(key));
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(std::stol(item)));
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "' lists no values");
  return out;
}

// measured constants checked in under data/; overridable per config key
double registry_value(const Config& cfg, const std::string& key,
                      const std::string& constant_name) {
  if (cfg.at(key) != "registry") return to_double(cfg, key);
  std::string path = "data/frozen_constants.txt";
  if (const char* env = std::getenv("EITLAB_DATA"))
    if (*env) path = std::string(env) + "/frozen_constants.txt";
  std::map<std::string, double> regs;
  try {
    regs = csvio::read_constants(path);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("constants registry unavailable (") +
                                e.what() + "); set " + key + " explicitly");
  }
  const auto it = regs.find(constant_name);
  if (it == regs.end())
    throw std::invalid_argument("registry has no constant '" + constant_name + "'");
  return it->second;
}

SpinParams spin_params(const Config& cfg) {
  return SpinParams{static_cast<int>(to_long(cfg, "ell")),
                    static_cast<int>(to_long(cfg, "r"))};
}

void maybe_plot(bool plot, const std::string& csv_path, const std::string& title,
                const std::vector<double>& xs, const std::vector<double>& ys) {
  if (!plot) return;
  std::string p = csv_path;
  if (p.size() > 4 && p.rfind(".csv") == p.size() - 4) p.resize(p.size() - 4);
  csvio::write_svg_plot(p + ".svg", title, xs, ys);
}

int run_pmf(const Config& cfg, bool plot) {
  const auto params = spin_params(cfg);
  const int level = static_cast<int>(to_long(cfg, "n"));
  const auto pmf = spin_tree::exact_pmf(params, level);
  csvio::Table t;
  t.columns = {"x", "prob"};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < pmf.points(); ++i) {
    if (pmf.mode == spin_tree::PmfMode::rational) {
      if (pmf.num[i] == 0) continue;
      mpq_class q(pmf.num[i], mpz_class(1) << pmf.denom_log2);
      q.canonicalize();
      t.rows.push_back({std::to_string(pmf.x_at(i)), q.get_str()});
    } else {
      if (pmf.mass[i] <= 0) continue;
      t.rows.push_back({std::to_string(pmf.x_at(i)),
                        csvio::format_double(static_cast<double>(pmf.mass[i]))});
    }
    xs.push_back(static_cast<double>(pmf.x_at(i)));
    ys.push_back(pmf.mass_at(pmf.x_at(i)));
  }
  csvio::write_table(out_path(cfg), t, cfg, 0);
  maybe_plot(plot, out_path(cfg), "level-sum pmf", xs, ys);
  return kOk;
}

int run_profile(const Config& cfg, bool plot) {
  const auto params = spin_params(cfg);
  const int level = static_cast<int>(to_long(cfg, "level"));
  const int n = static_cast<int>(to_long(cfg, "n"));
  const int klo = static_cast<int>(to_long(cfg, "k_lo"));
  const int khi = static_cast<int>(to_long(cfg, "k_hi"));
  if (klo < 1 || khi < klo)
    throw std::invalid_argument("profile needs 1 <= k_lo <= k_hi");
  csvio::Table t;
  t.columns = {"k", "value", "bound", "flagged"};
  std::vector<double> xs, ys;
  for (int k = klo; k <= khi; ++k) {
    const auto est = walk::exact_conditional_profile(params, level, n, k);
    t.rows.push_back({std::to_string(k), csvio::format_double(est.value),
                      csvio::format_double(est.bound), est.flagged ? "1" : "0"});
    xs.push_back(k);
    ys.push_back(est.value);
  }
  csvio::write_table(out_path(cfg), t, cfg, 0);
  maybe_plot(plot, out_path(cfg), "conditional concentration profile", xs, ys);
  return kOk;
}

int run_eit(const Config& cfg, bool plot) {
  paths::PathMeasureSpec spec;
  const std::string measure = cfg.at("measure");
  if (measure == "z3") {
    spec.kind = paths::MeasureKind::z3_unpredictable;
    spec.params = spin_params(cfg);
    spec.dimension = 3;
  } else if (measure == "uniform") {
    spec.kind = paths::MeasureKind::uniform;
    spec.dimension = static_cast<int>(to_long(cfg, "d"));
  } else {
    throw std::invalid_argument("measure must be z3 or uniform, not " + measure);
  }
  spec.seed = static_cast<std::uint64_t>(to_long(cfg, "seed"));
  const auto len = static_cast<std::size_t>(to_long(cfg, "length"));
  const auto pairs = static_cast<std::size_t>(to_long(cfg, "pairs"));
  const auto fit = paths::tail_fit(spec, len, pairs);
  csvio::Table t;
  t.meta = {"theta_hat: " + csvio::format_double(fit.theta_hat),
            "theta_ci: [" + csvio::format_double(fit.theta_lo) + ", " +
                csvio::format_double(fit.theta_hi) + "]",
            "c_major: " + csvio::format_double(fit.c_major),
            std::string("nonexponential: ") + (fit.nonexponential ? "1" : "0")};
  t.columns = {"c", "count", "survival"};
  std::vector<double> xs, ys;
  for (std::size_t c = 0; c < fit.counts.size(); ++c) {
    if (fit.counts[c] == 0) continue;
    t.rows.push_back({std::to_string(c + 1), std::to_string(fit.counts[c]),
                      csvio::format_double(fit.survival(c + 1))});
    xs.push_back(static_cast<double>(c + 1));
    ys.push_back(fit.survival(c + 1));
  }
  csvio::write_table(out_path(cfg), t, cfg, spec.seed);
  maybe_plot(plot, out_path(cfg), "collision-tail survival", xs, ys);
  return kOk;
}

int run_theta_d(const Config& cfg) {
  const int d = static_cast<int>(to_long(cfg, "d"));
  const auto seed = static_cast<std::uint64_t>(to_long(cfg, "seed"));
  const auto est = paths::theta_d_estimate(
      d, seed, static_cast<std::size_t>(to_long(cfg, "walks")),
      static_cast<std::size_t>(to_long(cfg, "horizon")));
  csvio::Table t;
  t.columns = {"d", "estimate", "lo", "hi", "walks", "horizon"};
  t.rows.push_back({std::to_string(d), csvio::format_double(est.estimate),
                    csvio::format_double(est.lo), csvio::format_double(est.hi),
                    std::to_string(est.walks), std::to_string(est.horizon)});
  csvio::write_table(out_path(cfg), t, cfg, seed);
  return kOk;
}

int run_survival(const Config& cfg) {
  paths::PathMeasureSpec spec;
  spec.kind = paths::MeasureKind::z3_unpredictable;
  spec.params = spin_params(cfg);
  spec.dimension = 3;
  spec.seed = static_cast<std::uint64_t>(to_long(cfg, "seed"));
  const double p = to_double(cfg, "p");
  const double theta = registry_value(cfg, "theta", "theta_z3");
  const double c = registry_value(cfg, "c", "c_major_z3");
  const auto rep = perc::survival_lower_bound_check(
      spec, p, theta, c, static_cast<int>(to_long(cfg, "n")),
      static_cast<std::size_t>(to_long(cfg, "trials")));
  csvio::Table t;
  t.columns = {"trials", "positive", "empirical", "bound", "se", "pass"};
  t.rows.push_back({std::to_string(rep.trials), std::to_string(rep.positive),
                    csvio::format_double(rep.empirical),
                    csvio::format_double(rep.bound), csvio::format_double(rep.se),
                    rep.pass ? "1" : "0"});
  csvio::write_table(out_path(cfg), t, cfg, spec.seed);
  if (to_bool(cfg, "assert") && !rep.pass) return kCheckFailed;
  return kOk;
}

int run_flow_energy(const Config& cfg) {
  paths::PathMeasureSpec spec;
  spec.kind = paths::MeasureKind::z3_unpredictable;
  spec.params = spin_params(cfg);
  spec.dimension = 3;
  const double p = to_double(cfg, "p");
  const double theta = registry_value(cfg, "theta", "theta_z3");
  const double c = registry_value(cfg, "c", "c_major_z3");
  const int n = static_cast<int>(to_long(cfg, "n"));
  const auto replicas = static_cast<std::size_t>(to_long(cfg, "replicas"));
  const auto samples = static_cast<std::size_t>(to_long(cfg, "samples"));
  const auto seed = static_cast<std::uint64_t>(to_long(cfg, "seed"));
  if (!(theta < p)) throw std::invalid_argument("flow-energy needs p > theta");

  csvio::Table t;
  t.columns = {"replica", "strength", "energy"};
  std::vector<double> zs, z2s, es;
  std::size_t positive = 0;
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    const auto pc = perc::sample_config(3, n, p, true, perc::PercMode::bond,
                                        rng::subseed(seed, rng::tag::kReplica, rep));
    auto draw = spec;
    draw.seed = rng::subseed(seed, rng::tag::kSample, rep);
    const auto flow = flows::build_flow(pc, draw, n, samples);
    double energy = 0;
    for (const auto& e : flow.edges) energy += e.value * e.value;
    t.rows.push_back({std::to_string(rep), csvio::format_double(flow.strength),
                      csvio::format_double(energy)});
    zs.push_back(flow.strength);
    z2s.push_back(flow.strength * flow.strength);
    es.push_back(energy);
    if (flow.strength > 0) ++positive;
  }
  const auto mz = stats::mean_se(zs);
  const auto mz2 = stats::mean_se(z2s);
  const auto me = stats::mean_se(es);
  const double q = theta / p;
  const double second_bound = c / (1 - q);
  const double energy_bound = c * q / ((1 - q) * (1 - q));
  const double survival_bound = (1 - q) / c;
  const double frac = static_cast<double>(positive) / static_cast<double>(replicas);
  const double frac_se = std::sqrt(frac * (1 - frac) / static_cast<double>(replicas));

  const bool mean_ok = std::abs(mz.mean - 1.0) <= 3 * mz.se;
  const bool second_ok = mz2.mean <= second_bound + 3 * mz2.se;
  const bool energy_ok = me.mean <= energy_bound + 3 * me.se;
  const bool survival_ok = frac >= survival_bound - 3 * frac_se;
  t.meta = {
      "mean_strength: " + csvio::format_double(mz.mean) + " +- " +
          csvio::format_double(mz.se) + " target 1, ok=" + (mean_ok ? "1" : "0"),
      "mean_square: " + csvio::format_double(mz2.mean) + " bound " +
          csvio::format_double(second_bound) + ", ok=" + (second_ok ? "1" : "0"),
      "mean_energy: " + csvio::format_double(me.mean) + " bound " +
          csvio::format_double(energy_bound) + ", ok=" + (energy_ok ? "1" : "0"),
      "survival_fraction: " + csvio::format_double(frac) + " lower bound " +
          csvio::format_double(survival_bound) + ", ok=" + (survival_ok ? "1" : "0"),
  };
  csvio::write_table(out_path(cfg), t, cfg, seed);
  if (to_bool(cfg, "assert") && !(mean_ok && second_ok && energy_ok && survival_ok))
    return kCheckFailed;
  return kOk;
}

int run_resistance(const Config& cfg, bool plot) {
  const int d = static_cast<int>(to_long(cfg, "d"));
  const double p = to_double(cfg, "p");
  // theta only gates feasibility (p > theta); the p = 1 control needs no
  // measured value, so don't demand the registry for it
  const double theta = (p == 1.0 && cfg.at("theta") == "registry")
                           ? 0.0
                           : registry_value(cfg, "theta", "theta_z3");
  const auto radii = to_int_list(cfg, "radii");
  const auto prof = flows::resistance_growth_profile(
      d, p, theta, radii, static_cast<std::size_t>(to_long(cfg, "replicas")),
      static_cast<std::uint64_t>(to_long(cfg, "seed")));
  csvio::Table t;
  t.meta = {"survivors: " + std::to_string(prof.survivors) + " of " +
                std::to_string(prof.replicas),
            "enough_survivors: " + std::string(prof.enough_survivors ? "1" : "0"),
            "note: " + prof.note};
  t.columns = {"radius", "median_r", "increment_per_unit"};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    t.rows.push_back({std::to_string(prof.radii[i]),
                      csvio::format_double(prof.median_r[i]),
                      i == 0 ? "" : csvio::format_double(prof.increments[i - 1])});
    xs.push_back(prof.radii[i]);
    ys.push_back(prof.median_r[i]);
  }
  csvio::write_table(out_path(cfg), t, cfg,
                     static_cast<std::uint64_t>(to_long(cfg, "seed")));
  maybe_plot(plot, out_path(cfg), "effective resistance growth", xs, ys);
  return kOk;
}

int run_walk(const Config& cfg, bool plot) {
  const auto params = spin_params(cfg);
  const auto seed = static_cast<std::uint64_t>(to_long(cfg, "seed"));
  const auto n = static_cast<std::size_t>(to_long(cfg, "n"));
  const auto path = walk::sample_stationary(params, seed, n);
  const auto vals = path.values();
  csvio::Table t;
  t.columns = {"step", "value"};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    t.rows.push_back({std::to_string(i), std::to_string(vals[i])});
    xs.push_back(static_cast<double>(i));
    ys.push_back(static_cast<double>(vals[i]));
  }
  csvio::write_table(out_path(cfg), t, cfg, seed);
  maybe_plot(plot, out_path(cfg), "stationary walk", xs, ys);
  return kOk;
}

int run_perc(const Config& cfg) {
  const int d = static_cast<int>(to_long(cfg, "d"));
  const int depth = static_cast<int>(to_long(cfg, "depth"));
  const double p = to_double(cfg, "p");
  const auto replicas = static_cast<std::size_t>(to_long(cfg, "replicas"));
  const auto base = static_cast<std::uint64_t>(to_long(cfg, "seed"));
  const std::vector<int> origin(static_cast<std::size_t>(d), 0);
  csvio::Table t;
  t.columns = {"replica", "vertices", "edges", "survived"};
  std::size_t survivors = 0;
  for (std::uint64_t s = 0; s < replicas; ++s) {
    const auto pc =
        perc::sample_config(d, depth, p, true, perc::PercMode::bond, base + s);
    const auto cl = perc::oriented_cluster(pc, origin);
    survivors += cl.truncated ? 1 : 0;
    t.rows.push_back({std::to_string(s), std::to_string(cl.vertices.size()),
                      std::to_string(cl.edges.size()), cl.truncated ? "1" : "0"});
  }
  t.meta = {"survivors: " + std::to_string(survivors) + " of " +
            std::to_string(replicas)};
  csvio::write_table(out_path(cfg), t, cfg, base);
  return kOk;
}

int dispatch(const Config& resolved, bool plot) {
  const std::string kind = resolved.at("kind");
  if (kind == "pmf") return run_pmf(resolved, plot);
  if (kind == "profile") return run_profile(resolved, plot);
  if (kind == "eit") return run_eit(resolved, plot);
  if (kind == "theta_d") return run_theta_d(resolved);
  if (kind == "survival") return run_survival(resolved);
  if (kind == "flow-energy") return run_flow_energy(resolved);
  if (kind == "resistance") return run_resistance(resolved, plot);
  throw std::invalid_argument("unknown experiment kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact spin-tree sums, unpredictable paths, and cluster flows"};
  app.set_version_flag("--version", std::string("eitlab ") + csvio::kToolVersion);
  app.require_subcommand(1);

  long ell = 2, r = 1, n = 3, k = 7, depth = 16, seed = 7, replicas = 50;
  double p = 0.95;
  std::string out, config_path, target;
  bool plot = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--out", out, "output CSV path");
    sub->add_flag("--plot", plot, "also write an SVG rendering next to the CSV");
  };

  auto* pmf = app.add_subcommand("pmf", "exact level-sum pmf as x,prob rows");
  pmf->add_option("--ell", ell, "copy multiplier (default 2)");
  pmf->add_option("--r", r, "fresh-spin count (default 1)");
  pmf->add_option("--n", n, "tree level (default 3)");
  add_common(pmf);

  auto* wlk = app.add_subcommand("walk", "stationary walk sample as step,value rows");
  wlk->add_option("--ell", ell, "copy multiplier (default 2)");
  wlk->add_option("--r", r, "fresh-spin count (default 1)");
  wlk->add_option("--n", n, "number of steps (default 3)");
  add_common(wlk);

  auto* prof = app.add_subcommand(
      "profile", "exact conditional concentration profile over prediction lags");
  prof->add_option("--ell", ell, "copy multiplier (default 2)");
  prof->add_option("--r", r, "fresh-spin count (default 1)");
  prof->add_option("--n", n, "tree level (default 3); history length is fixed at 8");
  prof->add_option("--k", k, "largest prediction lag (default 7)");
  add_common(prof);

  auto* eit = app.add_subcommand("eit", "pair-collision tail fit for the z3 measure");
  eit->add_option("--ell", ell, "copy multiplier (default 3 here)");
  eit->add_option("--r", r, "fresh-spin count (default 1)");
  eit->add_option("--n", n, "path length (default 512)");
  eit->add_option("--replicas", replicas, "sampled pairs (default 20000)");
  add_common(eit);

  auto* prc = app.add_subcommand("perc", "oriented cluster survival per replica");
  prc->add_option("--k", k, "dimension (default 2)");
  prc->add_option("--p", p, "edge retention (default 0.5)");
  prc->add_option("--depth", depth, "box depth (default 20)");
  prc->add_option("--replicas", replicas, "configs to sample (default 1000)");
  add_common(prc);

  auto* rst = app.add_subcommand("resist", "effective-resistance growth series");
  rst->add_option("--k", k, "dimension (default 3)");
  rst->add_option("--p", p, "edge retention (default 0.95)");
  rst->add_option("--depth", depth, "largest shell radius; series runs 1..depth");
  rst->add_option("--replicas", replicas, "configs to sample (default 50)");
  double theta_flag = 0.0;
  rst->add_option("--theta", theta_flag,
                  "collision-tail ratio for the p > theta gate (default: registry)");
  add_common(rst);

  auto* run = app.add_subcommand("run", "execute an experiment config file");
  run->add_option("config", config_path, "config file path")->required();

  auto* val = app.add_subcommand("validate", "re-parse an emitted CSV and re-check it");
  val->add_option("file", target, "CSV file to validate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kSchemaError;
  }

  try {
    Config cfg;
    const auto defaults = [&](const std::string& kind, CLI::App* sub) {
      cfg = csvio::config_schema(kind);
      cfg["kind"] = kind;
      if (sub->count("--seed") && cfg.count("seed"))
        cfg["seed"] = std::to_string(seed);
      if (!out.empty()) cfg["out"] = out;
    };
    if (pmf->parsed()) {
      defaults("pmf", pmf);
      cfg["ell"] = std::to_string(ell);
      cfg["r"] = std::to_string(r);
      cfg["n"] = std::to_string(n);
      return run_pmf(cfg, plot);
    }
    if (wlk->parsed()) {
      cfg = {{"kind", "walk"},        {"ell", std::to_string(ell)},
             {"r", std::to_string(r)}, {"n", std::to_string(n)},
             {"seed", std::to_string(seed)},
             {"out", out.empty() ? "walk.csv" : out}};
      return run_walk(cfg, plot);
    }
    if (prof->parsed()) {
      defaults("profile", prof);
      cfg["ell"] = std::to_string(ell);
      cfg["r"] = std::to_string(r);
      cfg["level"] = std::to_string(n);
      cfg["k_hi"] = std::to_string(k);
      return run_profile(cfg, plot);
    }
    if (eit->parsed()) {
      defaults("eit", eit);
      if (eit->count("--ell")) cfg["ell"] = std::to_string(ell);
      if (eit->count("--r")) cfg["r"] = std::to_string(r);
      if (eit->count("--n")) cfg["length"] = std::to_string(n);
      if (eit->count("--replicas")) cfg["pairs"] = std::to_string(replicas);
      return run_eit(cfg, plot);
    }
    if (prc->parsed()) {
      cfg = {{"kind", "perc"},
             {"d", prc->count("--k") ? std::to_string(k) : "2"},
             {"p", prc->count("--p") ? csvio::format_double(p) : "0.5"},
             {"depth", prc->count("--depth") ? std::to_string(depth) : "20"},
             {"replicas", prc->count("--replicas") ? std::to_string(replicas) : "1000"},
             {"seed", prc->count("--seed") ? std::to_string(seed) : "0"},
             {"out", out.empty() ? "perc.csv" : out}};
      return run_perc(cfg);
    }
    if (rst->parsed()) {
      defaults("resistance", rst);
      if (rst->count("--k")) cfg["d"] = std::to_string(k);
      if (rst->count("--p")) cfg["p"] = csvio::format_double(p);
      if (rst->count("--replicas")) cfg["replicas"] = std::to_string(replicas);
      if (rst->count("--theta")) cfg["theta"] = csvio::format_double(theta_flag);
      if (rst->count("--depth")) {
        std::string radii;
        for (long rad = 1; rad <= depth; ++rad)
          radii += (rad > 1 ? "," : "") + std::to_string(rad);
        cfg["radii"] = radii;
      }
      return run_resistance(cfg, plot);
    }
    if (run->parsed()) {
      const auto exp = csvio::parse_config(config_path);
      return dispatch(csvio::resolve_config(exp), false);
    }
    if (val->parsed()) {
      const std::string complaint = csvio::validate_file(target);
      if (complaint.empty()) {
        std::printf("%s: ok\n", target.c_str());
        return kOk;
      }
      std::fprintf(stderr, "%s: %s\n", target.c_str(), complaint.c_str());
      return kCheckFailed;
    }
  } catch (const budget_error& e) {
    std::fprintf(stderr, "over budget: %s\n", e.what());
    return kBudgetError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSchemaError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kSchemaError;
}
