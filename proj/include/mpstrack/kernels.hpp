#pragma once

#include <vector>

#include "mpstrack/types.hpp"

namespace mpstrack::kernels {

/// Execution mode for the data-parallel kernels. Parallel and Serial
/// produce bitwise-identical results: every output element is written
/// by exactly one thread with a fixed in-element summation order, so
/// the parallel variant is a pure work-split of the serial reference.
enum class Mode { Serial, Parallel };

/// Process-wide default mode (Parallel unless disabled).
Mode default_mode();
void set_default_mode(Mode m);

/// y = sum_b (I ⊗ h_b ⊗ I) x  for a chain of n sites with local
/// dimension d and the two-site terms h_b (d^2 x d^2) on bonds
/// b = 0..n-2. x has length d^n with site 0 the most significant index.
void apply_bond_terms(const std::vector<MatC>& terms, int n_sites, int phys_dim,
                      const VecC& x, VecC& y, Mode mode = default_mode());

VecC apply_bond_terms(const std::vector<MatC>& terms, int n_sites, int phys_dim,
                      const VecC& x, Mode mode = default_mode());

}  // namespace mpstrack::kernels
