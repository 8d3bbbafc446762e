#include "mpstrack/filter.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "mpstrack/kernels.hpp"
#include "mpstrack/linalg.hpp"

namespace mpstrack {

QuadratureMode quadrature_mode_from_string(const std::string& name) {
  if (name == "uniform") return QuadratureMode::Uniform;
  if (name == "gauss-hermite") return QuadratureMode::GaussHermite;
  if (name == "paper-faithful") return QuadratureMode::PaperFaithful;
  throw structural_error("unknown quadrature mode '" + name + "'");
}

std::string to_string(QuadratureMode mode) {
  switch (mode) {
    case QuadratureMode::Uniform: return "uniform";
    case QuadratureMode::GaussHermite: return "gauss-hermite";
    case QuadratureMode::PaperFaithful: return "paper-faithful";
  }
  return "?";
}

cplx FilterPlan::response(double e) const {
  cplx acc = 0.0;
  for (const FilterNode& n : nodes) acc += n.weight * std::exp(cplx(0.0, e * n.t));
  return acc;
}

namespace {

double gaussian_weight(double q, double de, double t) {
  return de / std::sqrt(2.0 * M_PI * q) * std::exp(-(de * t) * (de * t) / (2.0 * q));
}

void fill_uniform_nodes(FilterPlan& plan, double dt, std::int64_t limit) {
  const std::int64_t half = static_cast<std::int64_t>(std::ceil(plan.t_max / dt));
  plan.spacing = dt;
  plan.node_count = 2 * half + 1;
  if (plan.node_count > limit) return;  // leave unmaterialized
  plan.nodes.reserve(plan.node_count);
  for (std::int64_t i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) * dt;
    plan.nodes.push_back({t, dt * gaussian_weight(plan.q, plan.delta_e, t)});
  }
}

}  // namespace

FilterPlan make_filter_plan(double q, double delta_e, int n_sites, double j,
                            double target_eps, const FilterPlanOptions& opts) {
  if (q <= 0.0 || delta_e <= 0.0 || n_sites < 1 || j <= 0.0)
    throw structural_error("make_filter_plan: all arguments must be positive");
  if (target_eps >= 1.0 || target_eps <= 0.0)
    throw structural_error("make_filter_plan: target_eps must be in (0,1)");

  FilterPlan plan;
  plan.mode = opts.mode;
  plan.q = q;
  plan.delta_e = delta_e;
  plan.target_eps = target_eps;
  plan.energy_band = opts.energy_band > 0.0 ? opts.energy_band : 6.0 * delta_e;
  plan.substeps_per_unit_time = opts.substeps_per_unit_time;
  plan.evolve_bond_cap = opts.evolve_bond_cap;

  const double log_term = std::log(10.0 / target_eps);

  if (opts.mode == QuadratureMode::PaperFaithful) {
    plan.t_max = 99.0 * q / delta_e;
    plan.tail_bound = std::exp(-(delta_e * plan.t_max) * (delta_e * plan.t_max) / (2.0 * q));
    const double dt = target_eps / (10.0 * n_sites * j * plan.t_max * std::sqrt(q));
    fill_uniform_nodes(plan, dt, opts.node_limit);
    // Alias spacing is astronomically fine here, so the certified error
    // is just the tail (plus the same tail in the weight sum).
    plan.quad_error_bound = 2.0 * plan.tail_bound + target_eps / 10.0;
    plan.weight_sum = plan.executable()
                          ? 0.0  // filled below
                          : 1.0;
  } else {
    plan.t_max = std::sqrt(2.0 * q * log_term) / delta_e;
    plan.tail_bound = target_eps / 10.0;  // by construction of t_max
    if (opts.mode == QuadratureMode::Uniform) {
      // Sampling period sets the alias spacing Omega = 2 pi / dt. Keeping
      // Omega - E_band beyond the Gaussian's eps/10 radius certifies the
      // response over the whole band.
      const double omega = plan.energy_band + delta_e * std::sqrt(2.0 * log_term / q);
      const double dt = 2.0 * M_PI / omega;
      fill_uniform_nodes(plan, dt, opts.node_limit);
      const double alias_off = omega - plan.energy_band;
      plan.quad_error_bound =
          2.0 * std::exp(-(alias_off / delta_e) * (alias_off / delta_e) * q / 2.0) +
          2.0 * plan.tail_bound;
    } else {
      // Gauss-Hermite in the scaled variable; node count grown until the
      // measured response error over the band is within target.
      const double scale = std::sqrt(2.0 * q) / delta_e;  // t = scale * x
      int n = std::max(9, static_cast<int>(std::ceil(q)));
      std::vector<double> xs, ws;
      double err = 0.0;
      while (true) {
        linalg::gauss_hermite(n, xs, ws);
        err = 0.0;
        const int samples = 256;
        for (int k = 0; k <= samples; ++k) {
          const double e = plan.energy_band * k / samples;
          cplx acc = 0.0;
          for (size_t i = 0; i < xs.size(); ++i)
            acc += ws[i] / std::sqrt(M_PI) * std::exp(cplx(0.0, e * scale * xs[i]));
          const double ideal = std::exp(-q * (e / delta_e) * (e / delta_e) / 2.0);
          err = std::max(err, std::abs(acc - ideal));
        }
        if (err <= target_eps / 10.0 || n >= opts.gh_max_nodes) break;
        n = static_cast<int>(std::ceil(1.5 * n)) + 1;
      }
      if (err > target_eps / 10.0)
        throw std::runtime_error(
            "make_filter_plan: Gauss-Hermite did not reach the target accuracy within " +
            std::to_string(opts.gh_max_nodes) +
            " nodes; use the uniform mode for wide energy bands");
      plan.quad_error_bound = err + 2.0 * plan.tail_bound;
      for (int i = 0; i < n; ++i) {
        const double t = scale * xs[i];
        if (std::abs(t) > plan.t_max) continue;  // tail-weight nodes
        plan.nodes.push_back({t, ws[i] / std::sqrt(M_PI)});
      }
      std::sort(plan.nodes.begin(), plan.nodes.end(),
                [](const FilterNode& a, const FilterNode& b) { return a.t < b.t; });
      plan.node_count = static_cast<std::int64_t>(plan.nodes.size());
    }
  }

  if (plan.executable()) {
    double sum = 0.0;
    for (const FilterNode& nd : plan.nodes) sum += nd.weight;
    plan.weight_sum = sum;
    if (std::abs(sum - 1.0) > target_eps / 10.0 + 1e-12)
      throw std::runtime_error("make_filter_plan: weight sum " + std::to_string(sum) +
                               " deviates from 1 beyond target_eps/10");
  }
  return plan;
}

EnergyEstimate estimate_ground_energy(const Mps& state, const HamiltonianPath& path, double s) {
  if (state.n_sites() != path.n_sites() || state.phys_dim() != path.phys_dim())
    throw structural_error("estimate_ground_energy: state/path shape mismatch");
  const Mps psi = normalized(canonicalize(state, 0));
  const int d = psi.phys_dim();
  const int n = psi.n_sites();

  // Left environment built by transfer; the right side is right-isometric.
  MatC env = MatC::Ones(1, 1);
  double energy = 0.0;
  for (int b = 0; b < n - 1; ++b) {
    const MatC& a0 = psi.tensor(b);
    const MatC& a1 = psi.tensor(b + 1);
    const long chi_l = a0.rows() / d;
    const long chi_m = a1.rows() / d;
    const long chi_r = a1.cols();
    const MatC h = path.local_term(b, s);

    // theta[(l p), (q r)]
    MatC a1r(chi_m, d * chi_r);
    for (long l = 0; l < chi_m; ++l)
      for (int p = 0; p < d; ++p)
        for (long r = 0; r < chi_r; ++r) a1r(l, p * chi_r + r) = a1(l * d + p, r);
    MatC theta = a0 * a1r;

    // Apply h to the physical pair, then contract with env on the bra side.
    cplx val = 0.0;
    for (long l = 0; l < chi_l; ++l)
      for (long lb = 0; lb < chi_l; ++lb) {
        for (int po = 0; po < d; ++po)
          for (int qo = 0; qo < d; ++qo)
            for (int pi = 0; pi < d; ++pi)
              for (int qi = 0; qi < d; ++qi) {
                const cplx hval = h(po * d + qo, pi * d + qi);
                if (hval == cplx(0.0)) continue;
                for (long r = 0; r < chi_r; ++r)
                  val += std::conj(theta(lb * d + po, qo * chi_r + r)) * env(lb, l) * hval *
                         theta(l * d + pi, qi * chi_r + r);
              }
      }
    energy += val.real();

    MatC next = MatC::Zero(a0.cols(), a0.cols());
    for (int p = 0; p < d; ++p) {
      MatC sl(chi_l, a0.cols());
      for (long l = 0; l < chi_l; ++l) sl.row(l) = a0.row(l * d + p);
      next += sl.adjoint() * env * sl;
    }
    env = std::move(next);
  }
  return EnergyEstimate{energy, path.gap_promise() / 3.0};
}

EvolveResult trotter_evolve(const Mps& state, const HamiltonianPath& path, double s, double t,
                            int substeps, long bond_cap) {
  if (substeps < 1) throw structural_error("trotter_evolve: substeps must be >= 1");
  if (state.n_sites() != path.n_sites() || state.phys_dim() != path.phys_dim())
    throw structural_error("trotter_evolve: state/path shape mismatch");
  const int n = state.n_sites();
  if (t == 0.0) return EvolveResult{state, 0.0};

  const double tau = t / substeps;
  const cplx i_tau = cplx(0.0, tau);
  // Odd bonds (1-based): 0-based indices 0, 2, 4, ...
  std::vector<int> odd, even;
  for (int b = 0; b < n - 1; ++b) (b % 2 == 0 ? odd : even).push_back(b);

  std::vector<MatC> gate_odd_half(n - 1), gate_odd(n - 1), gate_even(n - 1);
  for (int b : odd) {
    const MatC h = path.local_term(b, s);
    gate_odd_half[b] = linalg::expm_hermitian(h, i_tau * 0.5);
    gate_odd[b] = linalg::expm_hermitian(h, i_tau);
  }
  for (int b : even) gate_even[b] = linalg::expm_hermitian(path.local_term(b, s), i_tau);

  const std::optional<long> cap =
      bond_cap > 0 ? std::optional<long>(bond_cap) : std::nullopt;
  double discarded = 0.0;
  Mps cur = state;
  auto sweep = [&](const std::vector<int>& bonds, const std::vector<MatC>& gates) {
    for (int b : bonds) {
      GateResult gr = apply_two_site_gate(cur, gates[b], b, cap);
      discarded += gr.discarded_weight;
      cur = std::move(gr.state);
    }
  };
  // Strang: odd(tau/2) [even(tau) odd(tau)]^(m-1) even(tau) odd(tau/2)
  sweep(odd, gate_odd_half);
  for (int m = 0; m < substeps - 1; ++m) {
    sweep(even, gate_even);
    sweep(odd, gate_odd);
  }
  sweep(even, gate_even);
  sweep(odd, gate_odd_half);
  return EvolveResult{std::move(cur), discarded};
}

FilterResult gaussian_filter(const Mps& state, const HamiltonianPath& path, double s,
                             const FilterPlan& plan, const EnergyEstimate& shift) {
  if (!plan.executable())
    throw structural_error("gaussian_filter: plan has " + std::to_string(plan.node_count) +
                           " nodes, beyond the execution limit; this discretization is for "
                           "bound audits only");
  const std::int64_t n_nodes = static_cast<std::int64_t>(plan.nodes.size());
  std::vector<Mps> evolved(n_nodes);
  std::vector<double> node_discard(n_nodes, 0.0);

  const bool parallel = kernels::default_mode() == kernels::Mode::Parallel && n_nodes > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < n_nodes; ++i) {
    const double t = plan.nodes[i].t;
    if (t == 0.0) {
      evolved[i] = state;
      continue;
    }
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(std::abs(t) * plan.substeps_per_unit_time)));
    EvolveResult ev = trotter_evolve(state, path, s, t, substeps, plan.evolve_bond_cap);
    evolved[i] = std::move(ev.state);
    node_discard[i] = ev.discarded_weight;
  }

  // Deterministic reduction in node order (nodes are sorted by t).
  std::vector<std::pair<cplx, Mps>> terms;
  terms.reserve(n_nodes);
  FilterResult out;
  double weight_total = 0.0;
  for (std::int64_t i = 0; i < n_nodes; ++i) {
    const double w = plan.nodes[i].weight;
    const double t = plan.nodes[i].t;
    // exp(i (H - shift) t) = exp(-i shift t) exp(i H t): fold the phase
    // into the weight.
    const cplx phase = std::exp(cplx(0.0, -shift.value * t));
    terms.emplace_back(w * phase, std::move(evolved[i]));
    out.max_node_bond = std::max(out.max_node_bond, terms.back().second.max_bond());
    out.discarded_weight += w * node_discard[i];
    weight_total += w;
  }
  if (weight_total > 0.0) out.discarded_weight /= weight_total;

  Mps compact = canonicalize(add_states(terms), 0);
  out.pre_norm = norm(compact);
  out.state = normalized(compact);
  return out;
}

}  // namespace mpstrack
