#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpstrack/model.hpp"
#include "mpstrack/mps.hpp"
#include "mpstrack/types.hpp"

namespace mpstrack {

enum class QuadratureMode { Uniform, GaussHermite, PaperFaithful };

QuadratureMode quadrature_mode_from_string(const std::string& name);
std::string to_string(QuadratureMode mode);

struct FilterNode {
  double t = 0.0;
  double weight = 0.0;
};

/// Discretization of the Gaussian time integral
///   (dE / sqrt(2 pi q)) \int dt exp(-(dE t)^2 / 2q) exp(i H t)
/// whose exact energy response is exp(-q (E/dE)^2 / 2).
///
/// Nodes are symmetric in t with equal weights; sum of weights ~ 1.
/// Within |E - shift| <= energy_band the realized response matches the
/// Gaussian to quad_error_bound; outside the band it is merely bounded
/// by the weight sum (no amplification).
struct FilterPlan {
  QuadratureMode mode = QuadratureMode::Uniform;
  double q = 0.0;
  double delta_e = 0.0;
  double target_eps = 0.0;
  double t_max = 0.0;
  double spacing = 0.0;  // uniform/paper modes; 0 for Gauss-Hermite
  double energy_band = 0.0;
  std::int64_t node_count = 0;
  std::vector<FilterNode> nodes;  // materialized when node_count <= limit
  double weight_sum = 0.0;
  double tail_bound = 0.0;        // Gaussian weight beyond t_max
  double quad_error_bound = 0.0;  // certified max |response - Gaussian| on the band
  int substeps_per_unit_time = 12;
  long evolve_bond_cap = 0;  // 0 = uncapped

  bool executable() const { return !nodes.empty(); }
  /// Exact scalar response of the discretized filter at energy offset e.
  cplx response(double e) const;
};

struct FilterPlanOptions {
  QuadratureMode mode = QuadratureMode::Uniform;
  double energy_band = 0.0;  // 0: default 6 * delta_e
  int substeps_per_unit_time = 12;
  long evolve_bond_cap = 0;
  std::int64_t node_limit = 200000;
  int gh_max_nodes = 2048;
};

/// Build the discretization for given sharpness q, gap promise and
/// target accuracy. The time cutoff follows the certified-tail rule
/// t_max = sqrt(2 q ln(10/eps)) / dE; the paper-faithful mode instead
/// uses t_max = 99 q / dE with uniform spacing
/// eps / (10 N J t_max sqrt(q)), which is auditable but far too many
/// nodes to execute beyond toy sizes.
FilterPlan make_filter_plan(double q, double delta_e, int n_sites, double j,
                            double target_eps, const FilterPlanOptions& opts = {});

struct EnergyEstimate {
  double value = 0.0;
  double claimed_accuracy = 0.0;  // dE/3 under the inductive assumption
};

/// Rayleigh quotient <psi|H(s)|psi>, accumulated bond by bond.
EnergyEstimate estimate_ground_energy(const Mps& state, const HamiltonianPath& path, double s);

struct EvolveResult {
  Mps state;
  double discarded_weight = 0.0;  // accumulated over all gates
};

/// exp(i H(s) t) |state> by second-order (Strang) even/odd
/// Trotterization with `substeps` steps and a per-gate bond cap.
EvolveResult trotter_evolve(const Mps& state, const HamiltonianPath& path, double s, double t,
                            int substeps, long bond_cap = 0);

struct FilterResult {
  Mps state;                  // normalized
  double pre_norm = 0.0;      // norm of the raw weighted sum
  double discarded_weight = 0.0;
  long max_node_bond = 0;     // largest bond among evolved nodes
};

/// One application of the discretized Gaussian filter at parameter s,
/// with the spectrum shifted by the energy estimate. Node evolutions
/// run in parallel; the weighted sum is a fixed-order reduction.
FilterResult gaussian_filter(const Mps& state, const HamiltonianPath& path, double s,
                             const FilterPlan& plan, const EnergyEstimate& shift);

}  // namespace mpstrack
