#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mpstrack/filter.hpp"
#include "mpstrack/model.hpp"
#include "mpstrack/mps.hpp"

namespace mpstrack {

/// Discretization of the parameter path: a_max is the smallest integer
/// strictly greater than 4 N J s_max / dE, so delta <= dE / (4 N J).
struct AdiabaticSchedule {
  int a_max = 1;
  double delta = 0.0;
  double s_max = 0.0;
  long k_max = 1;
  double eps_step = 0.0;   // per-step filter target
  double eps_final = 0.0;  // requested final error
  std::vector<double> grid;  // s_a = a * delta, a = 0..a_max

  double inductive_bound(int n_sites, double j, double delta_e) const;
};

AdiabaticSchedule compute_schedule(int n_sites, double j, double delta_e, double s_max,
                                   long k_max, double eps_final);
AdiabaticSchedule compute_schedule(const HamiltonianPath& path, long k_max, double eps_final);

struct StepDiagnostics {
  int a = 0;
  double s = 0.0;
  double energy_estimate = 0.0;
  long filter_max_bond = 0;   // largest node bond before the sum
  long sum_bond = 0;          // bond of the node sum entering truncation
  long post_bond = 0;         // bond after truncation
  std::vector<double> discarded;  // truncation, per bond
  double max_discarded = 0.0;
  double filter_discarded = 0.0;  // accumulated during evolutions
  double filter_pre_norm = 0.0;
  double eps_a = std::numeric_limits<double>::quiet_NaN();
  double pre_filter_overlap = std::numeric_limits<double>::quiet_NaN();
  double energy_variance = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
};

struct RunResult {
  Mps final_state;
  std::vector<StepDiagnostics> steps;
  std::vector<std::pair<std::string, cplx>> observables;
  double final_fidelity = std::numeric_limits<double>::quiet_NaN();
  int exit_code = 0;  // 0 ok, 2 invariant breach, 3 resource abort
  std::string abort_reason;
};

struct DriverOptions {
  bool oracle_checks = true;
  long oracle_max_dim = 1L << 12;
  double memory_budget_bytes = 2.0 * (1L << 30);
  std::function<void(const StepDiagnostics&)> on_step;  // logging hook
  std::vector<std::pair<std::string, ObservableProduct>> observables;
};

/// Steps 1-2 of the tracking loop: initialize from the product state,
/// then per grid point improve with the Gaussian filter (2a) and
/// truncate back to k_max (2b), recording diagnostics. In oracle mode
/// the measured per-step error is checked against the inductive bound
/// min(dE/12NJ, 1/99) and a breach aborts the run.
RunResult adiabatic_follow(const HamiltonianPath& path, const AdiabaticSchedule& schedule,
                           const FilterPlan& plan, const DriverOptions& options);

struct OverlapPair {
  int a = 0;
  double s_prev = 0.0, s = 0.0;
  double ground_overlap_sq = 0.0;
  double h_diff_norm = 0.0;
};

struct OverlapLemmaReport {
  std::vector<OverlapPair> pairs;
  double min_overlap_sq = 1.0;
  double max_h_diff = 0.0;
  double delta_e = 0.0;
  bool overlap_ok = false;  // all >= 1/2
  bool h_diff_ok = false;   // all <= dE/4 (+1e-9)
  bool pass() const { return overlap_ok && h_diff_ok; }
};

/// Exact-diagonalization check of the consecutive-step lemmas on the
/// schedule grid: ||H(s_a) - H(s_{a-1})|| <= dE/4 and
/// |<psi0_a, psi0_{a-1}>|^2 >= 1/2.
OverlapLemmaReport verify_overlap_lemma(const HamiltonianPath& path,
                                        const AdiabaticSchedule& schedule);

/// Default q for the filter: inverts the amplitude bounds
/// A' >= (1/4) e^{-q/18}, B' <= e^{-2q/9} so that the filtered state's
/// worst-case infidelity (B'/A')^2 is at most eps_step.
double auto_q(double eps_step);

}  // namespace mpstrack
