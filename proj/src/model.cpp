#include "mpstrack/model.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "mpstrack/linalg.hpp"

namespace mpstrack {

MatC pauli_x() {
  MatC m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
MatC pauli_y() {
  MatC m(2, 2);
  m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  return m;
}
MatC pauli_z() {
  MatC m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

HamiltonianPath::HamiltonianPath(std::string family, int n_sites, int phys_dim, TermFn term,
                                 double coupling_bound, double gap_promise, double s_max,
                                 std::vector<VecC> initial_product_state)
    : family_(std::move(family)),
      n_(n_sites),
      d_(phys_dim),
      term_(std::move(term)),
      j_(coupling_bound),
      gap_(gap_promise),
      s_max_(s_max),
      init_(std::move(initial_product_state)) {
  if (n_ < 2) throw structural_error("HamiltonianPath: need at least two sites");
  if (gap_ <= 0.0) throw structural_error("HamiltonianPath: gap promise must be positive");
  if (s_max_ < 0.0) throw structural_error("HamiltonianPath: s_max must be non-negative");
  if (static_cast<int>(init_.size()) != n_)
    throw structural_error("HamiltonianPath: initial state site count mismatch");
}

MatC HamiltonianPath::local_term(int bond, double s) const {
  if (bond < 0 || bond >= n_ - 1)
    throw structural_error("local_term: bond " + std::to_string(bond) + " out of range");
  if (s < -1e-12 || s > s_max_ + 1e-12)
    throw range_error("local_term: s=" + std::to_string(s) + " outside [0, " +
                      std::to_string(s_max_) + "]");
  return term_(bond, s);
}

long HamiltonianPath::dense_dim() const {
  long dim = 1;
  for (int i = 0; i < n_; ++i) {
    if (dim > (1L << 40) / d_) throw range_error("dense_dim: overflow");
    dim *= d_;
  }
  return dim;
}

namespace {

struct FamilyScan {
  double max_norm = 0.0;
  double max_deriv = 0.0;
};

FamilyScan scan_family(const HamiltonianPath::TermFn& term, int n, double s_max,
                       int grid_points) {
  FamilyScan out;
  const double h = 1e-5 * std::max(s_max, 1.0);
  for (int g = 0; g < grid_points; ++g) {
    const double s = grid_points > 1 ? s_max * g / (grid_points - 1) : 0.0;
    for (int b = 0; b < n - 1; ++b) {
      out.max_norm = std::max(out.max_norm, linalg::hermitian_norm(term(b, s)));
      const double lo = std::max(0.0, s - h);
      const double hi = std::min(s_max, s + h);
      if (hi > lo) {
        MatC diff = term(b, hi) - term(b, lo);
        out.max_deriv = std::max(out.max_deriv, linalg::hermitian_norm(diff) / (hi - lo));
      }
    }
  }
  return out;
}

HamiltonianPath make_tfim_like(const ModelSpec& spec, bool ramped) {
  const int n = spec.n_sites;
  if (n < 2) throw structural_error("build_path: n_sites must be >= 2");
  if (spec.s_max < 0.0) throw structural_error("build_path: s_max must be >= 0");
  double drive = 1.0;
  double declared_j = 0.0;
  for (const auto& [k, v] : spec.params) {
    if (k == "drive") drive = v;
    else if (k == "declared_j") declared_j = v;
    else throw structural_error("build_path: unknown parameter '" + k + "' for family " +
                                spec.family);
  }
  const MatC x = pauli_x();
  const MatC z = pauli_z();
  const MatC id = MatC::Identity(2, 2);
  const MatC xi = Eigen::kroneckerProduct(x, id);
  const MatC ix = Eigen::kroneckerProduct(id, x);
  const MatC zz = Eigen::kroneckerProduct(z, z);

  auto raw_term = [=](int b, double s) -> MatC {
    const double wl = (b == 0) ? 1.0 : 0.5;
    const double wr = (b == n - 2) ? 1.0 : 0.5;
    const double coupling = ramped ? drive * s : 0.0;
    return -(wl * xi + wr * ix) - coupling * zz;
  };

  FamilyScan scan = scan_family(raw_term, n, spec.s_max, 101);
  double j = scan.max_norm;
  double s_max = spec.s_max;
  HamiltonianPath::TermFn term = raw_term;
  if (scan.max_deriv > scan.max_norm) {
    // The derivative bound exceeds the term bound: rescale s -> s X/J so
    // that the rescaled derivative satisfies the bound again.
    const double f = scan.max_deriv / scan.max_norm;
    s_max = spec.s_max * f;
    term = [raw_term, f](int b, double s) { return raw_term(b, s / f); };
  }
  j *= 1.0 + 1e-12;  // guard against grid round-off at the maximizer
  if (declared_j > 0.0) j = declared_j;

  VecC plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  std::vector<VecC> init(n, plus);

  return HamiltonianPath(spec.family, n, 2, std::move(term), j, spec.gap_promise, s_max,
                         std::move(init));
}

}  // namespace

HamiltonianPath build_path(const ModelSpec& spec) {
  if (spec.family == "tfim-para") return make_tfim_like(spec, true);
  if (spec.family == "constant-x") return make_tfim_like(spec, false);
  throw structural_error("build_path: unknown family '" + spec.family + "'");
}

BoundsReport verify_bounds(const HamiltonianPath& path, int grid_points) {
  if (grid_points < 2) throw structural_error("verify_bounds: need at least 2 grid points");
  BoundsReport rep;
  rep.coupling_bound = path.coupling_bound();
  const double s_max = path.s_max();
  const double h = 1e-5 * std::max(s_max, 1.0);
  const double tol = 1e-9;
  for (int g = 0; g < grid_points; ++g) {
    const double s = s_max * g / (grid_points - 1);
    for (int b = 0; b < path.n_sites() - 1; ++b) {
      const double nh = linalg::hermitian_norm(path.local_term(b, s));
      if (nh > rep.max_term_norm) {
        rep.max_term_norm = nh;
        if (nh > rep.coupling_bound + tol) {
          rep.worst_bond = b;
          rep.worst_s = s;
        }
      }
      const double lo = std::max(0.0, s - h);
      const double hi = std::min(s_max, s + h);
      if (hi > lo) {
        const double nd =
            linalg::hermitian_norm(path.local_term(b, hi) - path.local_term(b, lo)) / (hi - lo);
        if (nd > rep.max_deriv_norm) {
          rep.max_deriv_norm = nd;
          if (nd > rep.coupling_bound + tol) {
            rep.worst_bond = b;
            rep.worst_s = s;
          }
        }
      }
    }
  }
  rep.norm_ok = rep.max_term_norm <= rep.coupling_bound + tol;
  rep.deriv_ok = rep.max_deriv_norm <= rep.coupling_bound + tol;
  return rep;
}

}  // namespace mpstrack
