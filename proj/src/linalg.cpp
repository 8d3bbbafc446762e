#include "mpstrack/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

namespace mpstrack::linalg {

namespace {
lapack_complex_double* lp(MatC& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}
}  // namespace

SvdResult svd_thin(const MatC& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  MatC a = m;  // zgesdd destroys its input
  SvdResult out;
  out.u.resize(rows, r);
  out.sigma.resize(r);
  out.vdag.resize(r, cols);
  if (r == 0) return out;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, lp(a), rows,
                                   out.sigma.data(), lp(out.u), rows, lp(out.vdag), r);
  if (info != 0) {
    // zgesdd occasionally fails to converge on ill-conditioned input;
    // zgesvd is slower but more robust.
    a = m;
    VecR superb(std::max<lapack_int>(1, r - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', rows, cols, lp(a), rows,
                          out.sigma.data(), lp(out.u), rows, lp(out.vdag), r,
                          superb.data());
  }
  if (info != 0) throw std::runtime_error("svd_thin: LAPACK failed, info=" + std::to_string(info));
  return out;
}

EighResult eigh(const MatC& h) {
  if (h.rows() != h.cols()) throw structural_error("eigh: matrix not square");
  EighResult out;
  out.eigenvectors = h;
  out.eigenvalues.resize(h.rows());
  if (h.rows() == 0) return out;
  const lapack_int n = static_cast<lapack_int>(h.rows());
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, lp(out.eigenvectors), n,
                                   out.eigenvalues.data());
  if (info != 0) throw std::runtime_error("eigh: LAPACK failed, info=" + std::to_string(info));
  return out;
}

MatC expm_hermitian(const MatC& h, cplx factor) {
  EighResult e = eigh(h);
  VecC phases(e.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(factor * e.eigenvalues[i]);
  return e.eigenvectors * phases.asDiagonal() * e.eigenvectors.adjoint();
}

double hermitian_norm(const MatC& h) {
  if (h.rows() == 0) return 0.0;
  MatC a = h;
  VecR w(h.rows());
  const lapack_int n = static_cast<lapack_int>(h.rows());
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, lp(a), n, w.data());
  if (info != 0) throw std::runtime_error("hermitian_norm: LAPACK failed");
  return std::max(std::abs(w[0]), std::abs(w[w.size() - 1]));
}

QrResult qr_thin(const MatC& m) {
  const Eigen::Index r = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<MatC> qr(m);
  QrResult out;
  out.q = qr.householderQ() * MatC::Identity(m.rows(), r);
  out.r = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  return out;
}

LqResult lq_thin(const MatC& m) {
  QrResult qr = qr_thin(m.adjoint());
  LqResult out;
  out.l = qr.r.adjoint();
  out.q = qr.q.adjoint();
  return out;
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw structural_error("gauss_hermite: n must be >= 1");
  // Golub-Welsch: Jacobi matrix with off-diagonal sqrt(k/2).
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(n);
  weights.resize(n);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    weights[k] = sqrt_pi * v0 * v0;
  }
}

}  // namespace mpstrack::linalg
