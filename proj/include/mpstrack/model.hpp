#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mpstrack/types.hpp"

namespace mpstrack {

/// Family name plus parameters; resolvable to a HamiltonianPath.
struct ModelSpec {
  std::string family;
  int n_sites = 0;
  double s_max = 0.0;
  double gap_promise = 1.0;
  std::map<std::string, double> params;
};

/// Parameter-dependent nearest-neighbor Hamiltonian
/// H(s) = sum_b h_{b,b+1}(s) on an open chain, with verified bounds
/// ||h|| <= J and ||d_s h|| <= J. Immutable after construction; the
/// term generator is pure and safe to call concurrently.
class HamiltonianPath {
 public:
  using TermFn = std::function<MatC(int bond, double s)>;

  HamiltonianPath(std::string family, int n_sites, int phys_dim, TermFn term,
                  double coupling_bound, double gap_promise, double s_max,
                  std::vector<VecC> initial_product_state);

  const std::string& family() const { return family_; }
  int n_sites() const { return n_; }
  int phys_dim() const { return d_; }
  double coupling_bound() const { return j_; }  // J
  double gap_promise() const { return gap_; }
  double s_max() const { return s_max_; }
  const std::vector<VecC>& initial_product_state() const { return init_; }

  /// h_{bond,bond+1}(s), bond in 0..n_sites-2, s in [0, s_max].
  MatC local_term(int bond, double s) const;

  long dense_dim() const;

 private:
  std::string family_;
  int n_;
  int d_;
  TermFn term_;
  double j_;
  double gap_;
  double s_max_;
  std::vector<VecC> init_;
};

struct BoundsReport {
  double max_term_norm = 0.0;
  double max_deriv_norm = 0.0;
  double coupling_bound = 0.0;
  bool norm_ok = false;
  bool deriv_ok = false;
  int worst_bond = -1;   // bond of the largest violation (or largest norm)
  double worst_s = 0.0;  // s where it occurred
  bool pass() const { return norm_ok && deriv_ok; }
};

/// Registered families:
///   "tfim-para"   transverse-field chain with a ramped ZZ coupling,
///                 h(s) = -(X_i + X_{i+1})/2 - drive*s Z_i Z_{i+1}
///                 (boundary terms carry the full -X weight);
///                 params: drive (default 1), declared_j (optional override).
///   "constant-x"  the s-independent transverse-field point, for tests.
/// A family whose ||d_s h|| exceeds ||h|| is accepted after rescaling
/// s -> s X/J, s_max -> s_max X/J, which restores ||d_s h|| <= J.
HamiltonianPath build_path(const ModelSpec& spec);

/// Sample s on a uniform grid and report the measured operator norms
/// against the declared J. Failures are reported, not thrown.
BoundsReport verify_bounds(const HamiltonianPath& path, int grid_points);

// Pauli matrices (phys_dim 2 helpers used across the test families).
MatC pauli_x();
MatC pauli_y();
MatC pauli_z();

}  // namespace mpstrack
