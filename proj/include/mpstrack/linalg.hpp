#pragma once

#include <vector>

#include "mpstrack/types.hpp"

namespace mpstrack::linalg {

struct SvdResult {
  MatC u;        // m x r, columns orthonormal
  VecR sigma;    // r, non-increasing
  MatC vdag;     // r x n, rows orthonormal
};

/// Thin SVD via LAPACK zgesdd. Singular values are returned in
/// non-increasing order (LAPACK guarantees the order; ties keep the
/// ascending original index, which makes truncation deterministic).
SvdResult svd_thin(const MatC& m);

struct EighResult {
  VecR eigenvalues;   // ascending
  MatC eigenvectors;  // columns
};

/// Full Hermitian eigendecomposition via LAPACK zheevd.
EighResult eigh(const MatC& h);

/// exp(factor * h) for Hermitian h, through the eigendecomposition.
MatC expm_hermitian(const MatC& h, cplx factor);

/// Operator (spectral) norm of a Hermitian matrix.
double hermitian_norm(const MatC& h);

struct QrResult {
  MatC q;  // m x r, columns orthonormal
  MatC r;  // r x n, upper trapezoidal
};

/// Thin QR factorization, r = min(m, n).
QrResult qr_thin(const MatC& m);

struct LqResult {
  MatC l;  // m x r, lower trapezoidal
  MatC q;  // r x n, rows orthonormal
};

/// Thin LQ factorization, r = min(m, n).
LqResult lq_thin(const MatC& m);

/// Nodes and weights of n-point Gauss-Hermite quadrature
/// (weight exp(-x^2)), via Golub-Welsch.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace mpstrack::linalg
