#include "mpstrack/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mpstrack/kernels.hpp"
#include "mpstrack/linalg.hpp"

namespace mpstrack::oracle {

namespace {

constexpr double kDegenerateTol = 1e-8;
constexpr long kDenseEigDim = 1024;

// Lanczos tridiagonalization with full reorthogonalization.
struct LanczosBasis {
  std::vector<VecC> v;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples v[j] and v[j+1]
};

LanczosBasis lanczos(const std::vector<MatC>& terms, int n, int d, const VecC& start, int m) {
  LanczosBasis out;
  VecC v = start / start.norm();
  out.v.push_back(v);
  VecC w;
  for (int j = 0; j < m; ++j) {
    kernels::apply_bond_terms(terms, n, d, out.v[j], w);
    const double a = std::real(out.v[j].dot(w));
    out.alpha.push_back(a);
    w -= a * out.v[j];
    if (j > 0) w -= out.beta[j - 1] * out.v[j - 1];
    // Full reorthogonalization keeps the basis clean over many steps.
    for (const VecC& u : out.v) w -= u.dot(w) * u;
    const double b = w.norm();
    if (b < 1e-13 || j == m - 1) break;
    out.beta.push_back(b);
    out.v.push_back(w / b);
  }
  return out;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiag_eig(const LanczosBasis& lz) {
  const int k = static_cast<int>(lz.alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = lz.alpha[i];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = lz.beta[i];
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t);
}

VecC ritz_vector(const LanczosBasis& lz, const Eigen::VectorXd& coeff) {
  VecC out = VecC::Zero(lz.v[0].size());
  for (size_t i = 0; i < lz.v.size(); ++i) out += coeff[static_cast<int>(i)] * lz.v[i];
  return out;
}

}  // namespace

std::vector<MatC> bond_terms(const HamiltonianPath& path, double s) {
  std::vector<MatC> terms;
  terms.reserve(path.n_sites() - 1);
  for (int b = 0; b < path.n_sites() - 1; ++b) terms.push_back(path.local_term(b, s));
  return terms;
}

MatC dense_hamiltonian(const HamiltonianPath& path, double s, long max_dim) {
  const long dim = path.dense_dim();
  if (dim > max_dim)
    throw range_error("dense_hamiltonian: dimension " + std::to_string(dim) +
                      " exceeds the memory guard " + std::to_string(max_dim) + " (" +
                      std::to_string(16.0 * dim * dim / (1 << 20)) + " MiB needed)");
  const int n = path.n_sites();
  const int d = path.phys_dim();
  std::vector<MatC> terms = bond_terms(path, s);
  MatC h = MatC::Zero(dim, dim);
  VecC basis = VecC::Zero(dim), column;
  for (long c = 0; c < dim; ++c) {
    basis[c] = 1.0;
    kernels::apply_bond_terms(terms, n, d, basis, column, kernels::Mode::Serial);
    h.col(c) = column;
    basis[c] = 0.0;
  }
  return h;
}

DenseSpectrum dense_spectrum(const HamiltonianPath& path, double s, long max_dim) {
  MatC h = dense_hamiltonian(path, s, max_dim);
  linalg::EighResult e = linalg::eigh(h);
  return DenseSpectrum{std::move(e.eigenvalues), std::move(e.eigenvectors)};
}

GroundState exact_ground_state(const HamiltonianPath& path, double s, long max_dim) {
  const long dim = path.dense_dim();
  if (dim > max_dim)
    throw range_error("exact_ground_state: dimension exceeds guard");
  GroundState out;
  if (dim <= kDenseEigDim) {
    DenseSpectrum sp = dense_spectrum(path, s, kDenseEigDim);
    out.vector = sp.eigenvectors.col(0);
    out.energy = sp.eigenvalues[0];
    out.gap = sp.gap();
  } else {
    const int n = path.n_sites();
    const int d = path.phys_dim();
    std::vector<MatC> terms = bond_terms(path, s);
    // Deterministic pseudo-random start vector.
    VecC start(dim);
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (long i = 0; i < dim; ++i) start[i] = cplx(g(rng), g(rng));
    const int m = static_cast<int>(std::min<long>(dim, 160));
    LanczosBasis lz = lanczos(terms, n, d, start, m);
    auto es = tridiag_eig(lz);
    out.energy = es.eigenvalues()[0];
    out.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
    out.vector = ritz_vector(lz, es.eigenvectors().col(0));
    out.vector /= out.vector.norm();
    // Residual check; one restart from the Ritz vector if needed.
    VecC hv = kernels::apply_bond_terms(terms, n, d, out.vector);
    double resid = (hv - out.energy * out.vector).norm();
    if (resid > 1e-9 * std::max(1.0, std::abs(out.energy))) {
      LanczosBasis lz2 = lanczos(terms, n, d, out.vector, m);
      auto es2 = tridiag_eig(lz2);
      out.energy = es2.eigenvalues()[0];
      out.gap = es2.eigenvalues()[1] - es2.eigenvalues()[0];
      out.vector = ritz_vector(lz2, es2.eigenvectors().col(0));
      out.vector /= out.vector.norm();
    }
  }
  out.degenerate = out.gap < kDegenerateTol;
  return out;
}

double fidelity_dense(const VecC& a, const VecC& b) {
  if (a.size() != b.size()) throw structural_error("fidelity: dimension mismatch");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const cplx ov = a.dot(b) / (na * nb);
  return std::norm(ov);
}

double fidelity(const Mps& state, const VecC& reference) {
  return fidelity_dense(to_dense(state), reference);
}

VecC dense_evolve(const VecC& v, const HamiltonianPath& path, double s, double t,
                  long max_dim) {
  const long dim = path.dense_dim();
  if (dim != v.size()) throw structural_error("dense_evolve: dimension mismatch");
  if (dim > max_dim) throw range_error("dense_evolve: dimension exceeds guard");
  if (t == 0.0) return v;
  if (dim <= kDenseEigDim) {
    DenseSpectrum sp = dense_spectrum(path, s, kDenseEigDim);
    VecC amps = sp.eigenvectors.adjoint() * v;
    for (long k = 0; k < dim; ++k) amps[k] *= std::exp(cplx(0.0, sp.eigenvalues[k] * t));
    return sp.eigenvectors * amps;
  }
  // Krylov exponential with time splitting.
  const int n = path.n_sites();
  const int d = path.phys_dim();
  std::vector<MatC> terms = bond_terms(path, s);
  const double h_norm = (n - 1) * path.coupling_bound();
  const int chunks = std::max(1, static_cast<int>(std::ceil(std::abs(t) * h_norm / 10.0)));
  const double dt = t / chunks;
  VecC cur = v;
  for (int c = 0; c < chunks; ++c) {
    const double nv = cur.norm();
    LanczosBasis lz = lanczos(terms, n, d, cur, 48);
    const int k = static_cast<int>(lz.alpha.size());
    Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      tm(i, i) = lz.alpha[i];
      if (i + 1 < k) tm(i, i + 1) = tm(i + 1, i) = lz.beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tm);
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(k);
    e1[0] = 1.0;
    Eigen::VectorXcd small = es.eigenvectors().cast<cplx>().adjoint() * e1;
    for (int i = 0; i < k; ++i) small[i] *= std::exp(cplx(0.0, es.eigenvalues()[i] * dt));
    small = es.eigenvectors().cast<cplx>() * small;
    VecC next = VecC::Zero(dim);
    for (int i = 0; i < k; ++i) next += small[i] * lz.v[i];
    cur = next * nv;
  }
  return cur;
}

double min_gap_on_grid(const HamiltonianPath& path, int grid_points) {
  if (grid_points < 1) throw structural_error("min_gap_on_grid: need at least one point");
  double min_gap = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid_points; ++g) {
    const double s =
        grid_points > 1 ? path.s_max() * g / (grid_points - 1) : path.s_max();
    min_gap = std::min(min_gap, exact_ground_state(path, s).gap);
  }
  return min_gap;
}

}  // namespace mpstrack::oracle
