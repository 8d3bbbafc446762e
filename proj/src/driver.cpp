#include "mpstrack/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mpstrack/linalg.hpp"
#include "mpstrack/oracle.hpp"

namespace mpstrack {

double AdiabaticSchedule::inductive_bound(int n_sites, double j, double delta_e) const {
  return std::min(delta_e / (12.0 * n_sites * j), 1.0 / 99.0);
}

AdiabaticSchedule compute_schedule(int n_sites, double j, double delta_e, double s_max,
                                   long k_max, double eps_final) {
  if (delta_e <= 0.0) throw structural_error("compute_schedule: gap promise must be positive");
  if (n_sites < 1 || j <= 0.0) throw structural_error("compute_schedule: bad N or J");
  if (s_max < 0.0) throw structural_error("compute_schedule: s_max must be >= 0");
  if (eps_final <= 0.0 || eps_final >= 1.0)
    throw structural_error("compute_schedule: eps_final must be in (0,1)");
  if (k_max < 1) throw structural_error("compute_schedule: k_max must be >= 1");

  AdiabaticSchedule sch;
  const double x = 4.0 * n_sites * j * s_max / delta_e;
  sch.a_max = static_cast<int>(std::floor(x)) + 1;  // smallest integer > x
  sch.delta = s_max / sch.a_max;
  sch.s_max = s_max;
  sch.k_max = k_max;
  sch.eps_final = eps_final;
  // Invert the per-step error recursion
  //   eps_a = eps (1 + 8(N-1) + 2 sqrt(8(N-1)))
  // against both the inductive bound and the final target.
  const double amp = 1.0 + 8.0 * (n_sites - 1) + 2.0 * std::sqrt(8.0 * (n_sites - 1.0));
  sch.eps_step = std::min(sch.inductive_bound(n_sites, j, delta_e), eps_final) / amp;
  sch.grid.resize(sch.a_max + 1);
  for (int a = 0; a <= sch.a_max; ++a) sch.grid[a] = a * sch.delta;
  sch.grid[sch.a_max] = s_max;  // exact endpoint
  return sch;
}

AdiabaticSchedule compute_schedule(const HamiltonianPath& path, long k_max, double eps_final) {
  return compute_schedule(path.n_sites(), path.coupling_bound(), path.gap_promise(),
                          path.s_max(), k_max, eps_final);
}

double auto_q(double eps_step) {
  if (eps_step <= 0.0 || eps_step >= 1.0) throw structural_error("auto_q: eps_step in (0,1)");
  return 3.0 * std::log(3.0 / eps_step);
}

namespace {

ObservableProduct single_site(int n, int d, int site, const MatC& op) {
  ObservableProduct o(n, d);
  o.set_site_op(site, op);
  return o;
}

double estimate_sum_bytes(const FilterPlan& plan, const Mps& state, long evolve_cap) {
  // Block-diagonal sum: every interior bond is the node-count times the
  // evolved bond; the evolved bond is capped by the gate cap and the
  // chain shape.
  const int n = state.n_sites();
  const int d = state.phys_dim();
  double bytes = 0.0;
  for (int i = 0; i < n; ++i) {
    double left = std::min(std::pow(d, i), std::pow(d, n - i));
    double right = std::min(std::pow(d, i + 1), std::pow(d, n - i - 1));
    if (evolve_cap > 0) {
      left = std::min(left, static_cast<double>(evolve_cap));
      right = std::min(right, static_cast<double>(evolve_cap));
    }
    const double nodes = static_cast<double>(plan.node_count);
    bytes += (nodes * left) * d * (nodes * right) * 16.0;
  }
  return bytes;
}

}  // namespace

RunResult adiabatic_follow(const HamiltonianPath& path, const AdiabaticSchedule& schedule,
                           const FilterPlan& plan, const DriverOptions& options) {
  const int n = path.n_sites();
  RunResult result;
  Mps psi = Mps::product_state(path.initial_product_state());

  const bool oracle_on = options.oracle_checks && path.dense_dim() <= options.oracle_max_dim;
  const double eps_bound =
      schedule.inductive_bound(n, path.coupling_bound(), path.gap_promise());

  for (int a = 1; a <= schedule.a_max; ++a) {
    const auto t0 = std::chrono::steady_clock::now();
    StepDiagnostics diag;
    diag.a = a;
    diag.s = schedule.grid[a];

    oracle::GroundState gs;
    if (oracle_on) {
      gs = oracle::exact_ground_state(path, diag.s, options.oracle_max_dim);
      diag.pre_filter_overlap = oracle::fidelity(psi, gs.vector);
    }

    if (schedule.grid[a] == schedule.grid[a - 1]) {
      // Degenerate grid (s_max = 0): nothing to do.
      diag.energy_estimate = estimate_ground_energy(psi, path, diag.s).value;
      diag.post_bond = psi.max_bond();
      if (oracle_on) diag.eps_a = 1.0 - oracle::fidelity(psi, gs.vector);
    } else {
      const double bytes = estimate_sum_bytes(plan, psi, plan.evolve_bond_cap);
      if (bytes > options.memory_budget_bytes) {
        result.exit_code = 3;
        result.abort_reason = "projected node-sum size " + std::to_string(bytes / (1 << 30)) +
                              " GiB exceeds the memory budget";
        result.final_state = std::move(psi);
        return result;
      }

      const EnergyEstimate shift = estimate_ground_energy(psi, path, diag.s);
      diag.energy_estimate = shift.value;

      FilterResult filtered = gaussian_filter(psi, path, diag.s, plan, shift);
      diag.filter_max_bond = filtered.max_node_bond;
      diag.sum_bond = filtered.state.max_bond();
      diag.filter_discarded = filtered.discarded_weight;
      diag.filter_pre_norm = filtered.pre_norm;

      auto [truncated, report] = truncate_to_bond(filtered.state, schedule.k_max);
      psi = std::move(truncated);
      diag.discarded = report.discarded;
      diag.max_discarded = report.max_discarded;
      diag.post_bond = psi.max_bond();

      if (oracle_on) {
        diag.eps_a = 1.0 - oracle::fidelity(psi, gs.vector);
      } else {
        // Proxy signal: energy variance of the tracked state.
        const EnergyEstimate e1 = estimate_ground_energy(psi, path, diag.s);
        const Mps hpsi = [&] {
          std::vector<std::pair<cplx, Mps>> terms;
          for (int b = 0; b < n - 1; ++b) {
            GateResult g = apply_two_site_gate(psi, path.local_term(b, diag.s), b, std::nullopt);
            terms.emplace_back(1.0, std::move(g.state));
          }
          return add_states(terms);
        }();
        const double h2 = std::real(inner_product(hpsi, hpsi));
        diag.energy_variance = h2 - e1.value * e1.value;
      }
    }

    diag.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.steps.push_back(diag);
    if (options.on_step) options.on_step(diag);

    if (oracle_on && diag.eps_a > eps_bound) {
      result.exit_code = 2;
      result.abort_reason = "inductive invariant breached at step " + std::to_string(a) +
                            ": eps_a=" + std::to_string(diag.eps_a) + " > " +
                            std::to_string(eps_bound);
      result.final_state = std::move(psi);
      return result;
    }
  }

  for (const auto& [name, obs] : options.observables)
    result.observables.emplace_back(name, expect_product_observable(psi, obs));
  if (oracle_on) {
    oracle::GroundState gs = oracle::exact_ground_state(path, schedule.s_max,
                                                        options.oracle_max_dim);
    result.final_fidelity = oracle::fidelity(psi, gs.vector);
  }
  result.final_state = std::move(psi);
  return result;
}

OverlapLemmaReport verify_overlap_lemma(const HamiltonianPath& path,
                                        const AdiabaticSchedule& schedule) {
  OverlapLemmaReport rep;
  rep.delta_e = path.gap_promise();
  VecC prev;
  for (int a = 0; a <= schedule.a_max; ++a) {
    oracle::GroundState gs = oracle::exact_ground_state(path, schedule.grid[a]);
    if (a > 0) {
      OverlapPair p;
      p.a = a;
      p.s_prev = schedule.grid[a - 1];
      p.s = schedule.grid[a];
      p.ground_overlap_sq = oracle::fidelity_dense(prev, gs.vector);
      MatC diff = oracle::dense_hamiltonian(path, p.s) -
                  oracle::dense_hamiltonian(path, p.s_prev);
      p.h_diff_norm = linalg::hermitian_norm(diff);
      rep.min_overlap_sq = std::min(rep.min_overlap_sq, p.ground_overlap_sq);
      rep.max_h_diff = std::max(rep.max_h_diff, p.h_diff_norm);
      rep.pairs.push_back(p);
    }
    prev = gs.vector;
  }
  rep.overlap_ok = rep.min_overlap_sq >= 0.5;
  rep.h_diff_ok = rep.max_h_diff <= rep.delta_e / 4.0 + 1e-9;
  return rep;
}

}  // namespace mpstrack
