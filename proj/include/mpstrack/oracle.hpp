#pragma once

#include <vector>

#include "mpstrack/model.hpp"
#include "mpstrack/mps.hpp"
#include "mpstrack/types.hpp"

namespace mpstrack::oracle {

/// Ground truth for small chains: dense spectra, exact ground states,
/// gaps and dense time evolution. All calls are pure and reentrant.

struct DenseSpectrum {
  VecR eigenvalues;   // ascending
  MatC eigenvectors;  // orthonormal columns
  double gap() const { return eigenvalues[1] - eigenvalues[0]; }
};

/// Materialize H(s) as a dense Hermitian matrix. Guarded: refuses when
/// the dimension exceeds max_dim (the matrix alone is 16 dim^2 bytes).
MatC dense_hamiltonian(const HamiltonianPath& path, double s, long max_dim = 1L << 12);

/// Full diagonalization of H(s); intended for dimensions <= ~4096.
DenseSpectrum dense_spectrum(const HamiltonianPath& path, double s, long max_dim = 1L << 12);

struct GroundState {
  VecC vector;
  double energy = 0.0;
  double gap = 0.0;
  bool degenerate = false;  // gap below the uniqueness tolerance
};

/// Lowest eigenpair and gap. Dense diagonalization for dimensions up to
/// 1024, matrix-free Lanczos beyond (up to max_dim).
GroundState exact_ground_state(const HamiltonianPath& path, double s, long max_dim = 1L << 20);

/// |<dense(state), reference>|^2 with both vectors normalized.
double fidelity(const Mps& state, const VecC& reference);
double fidelity_dense(const VecC& a, const VecC& b);

/// exp(i H(s) t) v. Eigendecomposition for small dimensions, Krylov
/// (Lanczos) exponential with time splitting beyond.
VecC dense_evolve(const VecC& v, const HamiltonianPath& path, double s, double t,
                  long max_dim = 1L << 20);

/// Minimum spectral gap of H(s) on a uniform grid over [0, s_max].
double min_gap_on_grid(const HamiltonianPath& path, int grid_points);

/// The bond terms of H(s) in dense d^2 x d^2 form (matrix-free matvec input).
std::vector<MatC> bond_terms(const HamiltonianPath& path, double s);

}  // namespace mpstrack::oracle
