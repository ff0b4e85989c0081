#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eitlab/percolation.hpp"

namespace eitlab::flows {

// net flow on the directed edge (tail, tail + e_axis)
struct FlowEdge {
  std::vector<int> tail;
  int axis = 0;
  double value = 0.0;
};

struct FlowAssignment {
  int dimension = 0;
  int depth = 0;  // paths run from the origin for this many steps
  double p = 1.0;
  std::vector<FlowEdge> edges;
  double strength = 0.0;  // total outflow from the origin
  std::size_t paths_used = 0;
  bool exact_mu = false;  // enumerated the measure instead of sampling it
};

// Z_N = p^{-N} * mu{paths whose first N edges are open}; enumerates the
// measure exactly when its depth-N support is at most 10^5, otherwise Monte
// Carlo over path_samples draws
double estimate_ZN(const perc::PercConfig& cfg, const paths::PathMeasureSpec& spec,
                   int n, std::size_t path_samples);

FlowAssignment build_flow(const perc::PercConfig& cfg,
                          const paths::PathMeasureSpec& spec, int n,
                          std::size_t path_samples);

// worst conservation violation over interior vertices (source and the depth-N
// sinks excluded); the construction keeps this at machine precision
double conservation_defect(const FlowAssignment& flow);

struct EnergyReport {
  double strength = 0.0;
  double energy = 0.0;
  double bound = 0.0;  // C (theta/p) / (1 - theta/p)^2, or +inf when p <= theta
  double resistance_proxy = 0.0;  // energy / strength^2
  bool bound_finite = false;
};

EnergyReport energy_report(const FlowAssignment& flow, double theta, double c,
                           double p);

struct MartingaleReport {
  std::vector<int> depths;
  std::vector<double> mean, mean_se;
  std::vector<double> second, second_se;
  double second_bound = 0.0;  // C / (1 - theta/p)
  bool bound_applicable = false;
  bool mean_ok = false;
  bool second_ok = false;
  double drift_slope = 0.0, drift_se = 0.0;
  bool drift_ok = false;  // slope CI contains zero
  std::size_t replicas = 0;
};

// samples one config per replica and tracks Z_N along the depth list
MartingaleReport martingale_check(const paths::PathMeasureSpec& spec, double p,
                                  double theta, double c,
                                  const std::vector<int>& depths,
                                  std::size_t replicas, std::size_t path_samples,
                                  std::uint64_t seed);

// potential at v0 when a unit current enters there and the sink set is
// grounded, every edge a unit resistor; +inf when no sink is reachable
double effective_resistance(const perc::ClusterGraph& g, int v0,
                            const std::vector<int>& sinks);

// cluster vertices whose coordinates sum to n (the unit-speed sphere)
std::vector<int> depth_sinks(const perc::ClusterGraph& g, int n);

struct ResistanceProfile {
  std::vector<int> radii;
  std::vector<double> median_r;
  std::vector<double> increments;  // median_r steps per unit of radius
  std::size_t replicas = 0;
  std::size_t survivors = 0;  // clusters that reached the largest radius
  bool enough_survivors = false;
  bool decreasing_increments = false;
  std::string note;
};

// median R(origin -> shell r) over surviving oriented clusters; p = 1 runs on
// the full lattice as a deterministic control
ResistanceProfile resistance_growth_profile(int d, double p, double theta,
                                            const std::vector<int>& radii,
                                            std::size_t replicas,
                                            std::uint64_t seed);

}  // namespace eitlab::flows
