#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mpstrack/types.hpp"

namespace mpstrack {

/// Open-boundary matrix product state with uniform physical dimension.
///
/// Site tensor i has shape (chi_{i-1}, d, chi_i) and is stored
/// left-fused as a (chi_{i-1} * d) x chi_i matrix with row index
/// l * d + p. The represented vector is the tensor contraction times
/// exp(log_norm); the scale factor keeps long products of small filter
/// weights away from underflow. Site 0 is the most significant index
/// of the dense amplitude ordering.
class Mps {
 public:
  Mps() = default;
  Mps(int n_sites, int phys_dim, std::vector<MatC> tensors, int center = -1,
      double log_norm = 0.0);

  static Mps product_state(const std::vector<VecC>& site_vectors);

  int n_sites() const { return n_; }
  int phys_dim() const { return d_; }
  /// Bond b in 0..n_sites: chi_0 = chi_n = 1 at the boundaries.
  long bond_dim(int b) const;
  long max_bond() const;
  /// Canonical center site, or -1 when no canonical form is claimed.
  int canonical_center() const { return center_; }
  double log_norm() const { return log_norm_; }

  const MatC& tensor(int i) const { return a_.at(i); }
  MatC& mutable_tensor(int i);  // clears the canonical-center claim

  void set_center(int c) { center_ = c; }
  void add_log_norm(double delta) { log_norm_ += delta; }
  void set_log_norm(double v) { log_norm_ = v; }

  /// Consistency of the bond chain (right bond of i == left bond of i+1).
  void check_shapes() const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<MatC> a_;
  int center_ = -1;
  double log_norm_ = 0.0;
};

struct SchmidtSpectrum {
  int bond = 0;                      // 1..n_sites-1
  std::vector<double> coefficients;  // non-increasing, >= 0
  double tail_weight(long k) const;  // sum_{alpha > k} A(alpha)^2
};

/// Product of single-site operators, identity by default.
class ObservableProduct {
 public:
  ObservableProduct(int n_sites, int phys_dim);
  void set_site_op(int site, const MatC& op);
  const MatC& site_op(int site) const { return ops_.at(site); }
  double op_norm(int site) const { return norms_.at(site); }
  int n_sites() const { return static_cast<int>(ops_.size()); }
  int phys_dim() const { return d_; }

 private:
  int d_;
  std::vector<MatC> ops_;
  std::vector<double> norms_;
};

struct TruncationReport {
  std::vector<double> discarded;  // per bond, relative weight
  double max_discarded = 0.0;
  double bound_rhs = 0.0;       // 8 (N-1) * max_discarded
  double realized_error = 0.0;  // |psi_out - psi_in|^2, NaN when skipped
};

/// Singular values below this times the largest are treated as zero.
inline constexpr double kSingularValueFloor = 1e-14;

// --- core operations (pure; inputs are never mutated) ---

/// Gauge-fix so that tensors left of `center` are left isometries and
/// tensors right of it are right isometries. Same represented vector.
Mps canonicalize(const Mps& state, int center);

/// 2-norm of the represented vector (including log_norm).
double norm(const Mps& state);

/// Same vector scaled to unit norm, log_norm reset to zero.
Mps normalized(const Mps& state);

cplx inner_product(const Mps& a, const Mps& b);

cplx expect_product_observable(const Mps& state, const ObservableProduct& obs);

SchmidtSpectrum schmidt_spectrum(const Mps& state, int bond);

struct GateResult {
  Mps state;
  double discarded_weight = 0.0;  // relative weight dropped by the cap
};

/// Apply a (d^2 x d^2) two-site operator to sites (site, site+1) and
/// re-split by SVD. With a bond cap the smallest singular values are
/// discarded. Gate rows/cols are indexed p * d + q with p on `site`.
GateResult apply_two_site_gate(const Mps& state, const MatC& gate, int site,
                               std::optional<long> bond_cap);

/// Weighted sum as a block-diagonal construction: every interior bond
/// of the result is the sum of the terms' bonds.
Mps add_states(const std::vector<std::pair<cplx, Mps>>& terms);

/// Sequential projector sweep: for each bipartition keep the k_max
/// largest Schmidt coefficients, then renormalize. The report carries
/// the pre-normalization discarded weights.
std::pair<Mps, TruncationReport> truncate_to_bond(const Mps& state, long k_max);

/// Dense amplitude vector (site 0 most significant). Guarded against
/// oversized outputs.
VecC to_dense(const Mps& state, long max_dim = 1L << 20);

/// Haar-ish random state with interior bonds capped at chi, normalized.
Mps random_mps(int n_sites, int phys_dim, long chi, std::mt19937_64& rng);

/// Shapes, bond dimensions and per-bond Schmidt spectra as a text record.
std::string debug_dump(const Mps& state);

}  // namespace mpstrack
