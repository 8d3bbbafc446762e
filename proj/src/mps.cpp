#include "mpstrack/mps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mpstrack/linalg.hpp"

namespace mpstrack {

namespace {

// (chiL * d) x chiR  ->  chiL x (d * chiR), element (l, p, r) preserved.
MatC to_right_fused(const MatC& a, long chi_l, int d) {
  const long chi_r = a.cols();
  MatC out(chi_l, d * chi_r);
  for (long l = 0; l < chi_l; ++l)
    for (int p = 0; p < d; ++p)
      for (long r = 0; r < chi_r; ++r) out(l, p * chi_r + r) = a(l * d + p, r);
  return out;
}

// chiL x (d * chiR)  ->  (chiL * d) x chiR.
MatC to_left_fused(const MatC& a, int d) {
  const long chi_l = a.rows();
  const long chi_r = a.cols() / d;
  MatC out(chi_l * d, chi_r);
  for (long l = 0; l < chi_l; ++l)
    for (int p = 0; p < d; ++p)
      for (long r = 0; r < chi_r; ++r) out(l * d + p, r) = a(l, p * chi_r + r);
  return out;
}

// Physical slice p of a left-fused tensor: chiL x chiR.
MatC phys_slice(const MatC& a, int d, int p) {
  const long chi_l = a.rows() / d;
  MatC out(chi_l, a.cols());
  for (long l = 0; l < chi_l; ++l) out.row(l) = a.row(l * d + p);
  return out;
}

long kept_rank(const VecR& sigma, std::optional<long> cap) {
  if (sigma.size() == 0) return 0;
  const double floor = kSingularValueFloor * sigma[0];
  long k = 0;
  while (k < sigma.size() && sigma[k] > floor) ++k;
  k = std::max<long>(k, 1);
  if (cap) k = std::min(k, std::max<long>(*cap, 1));
  return k;
}

}  // namespace

Mps::Mps(int n_sites, int phys_dim, std::vector<MatC> tensors, int center, double log_norm)
    : n_(n_sites), d_(phys_dim), a_(std::move(tensors)), center_(center), log_norm_(log_norm) {
  if (n_ < 1) throw structural_error("Mps: need at least one site");
  if (d_ < 1) throw structural_error("Mps: physical dimension must be positive");
  if (static_cast<int>(a_.size()) != n_) throw structural_error("Mps: tensor count != n_sites");
  check_shapes();
}

void Mps::check_shapes() const {
  long left = 1;
  for (int i = 0; i < n_; ++i) {
    if (a_[i].rows() != left * d_)
      throw structural_error("Mps: tensor " + std::to_string(i) + " has left bond " +
                             std::to_string(a_[i].rows() / d_) + ", expected " +
                             std::to_string(left));
    left = a_[i].cols();
  }
  if (left != 1) throw structural_error("Mps: right boundary bond must be 1");
}

Mps Mps::product_state(const std::vector<VecC>& site_vectors) {
  if (site_vectors.empty()) throw structural_error("product_state: no sites");
  const int d = static_cast<int>(site_vectors[0].size());
  std::vector<MatC> a;
  a.reserve(site_vectors.size());
  for (const VecC& v : site_vectors) {
    if (v.size() != d) throw structural_error("product_state: inconsistent local dimension");
    MatC m(d, 1);
    m.col(0) = v;
    a.push_back(std::move(m));
  }
  return Mps(static_cast<int>(site_vectors.size()), d, std::move(a), 0, 0.0);
}

long Mps::bond_dim(int b) const {
  if (b < 0 || b > n_) throw structural_error("bond_dim: bond out of range");
  if (b == 0) return 1;
  return a_[b - 1].cols();
}

long Mps::max_bond() const {
  long m = 1;
  for (int b = 1; b < n_; ++b) m = std::max(m, bond_dim(b));
  return m;
}

MatC& Mps::mutable_tensor(int i) {
  center_ = -1;
  return a_.at(i);
}

Mps canonicalize(const Mps& state, int center) {
  const int n = state.n_sites();
  const int d = state.phys_dim();
  if (center < 0 || center >= n) throw structural_error("canonicalize: center out of range");
  state.check_shapes();
  std::vector<MatC> a;
  a.reserve(n);
  for (int i = 0; i < n; ++i) a.push_back(state.tensor(i));

  // With a valid center already in place only the tensors between the
  // old and new center need re-gauging.
  const int c0 = state.canonical_center();
  int left_from = 0, right_from = n - 1;
  if (c0 >= 0) {
    left_from = std::min(c0, center);
    right_from = std::max(c0, center);
  }

  // Left-to-right QR up to the center.
  for (int i = left_from; i < center; ++i) {
    linalg::QrResult qr = linalg::qr_thin(a[i]);
    a[i] = std::move(qr.q);
    const long chi_m = a[i + 1].rows() / d;
    a[i + 1] = to_left_fused(qr.r * to_right_fused(a[i + 1], chi_m, d), d);
  }
  // Right-to-left LQ down to the center.
  for (int i = right_from; i > center; --i) {
    const long chi_l = a[i].rows() / d;
    linalg::LqResult lq = linalg::lq_thin(to_right_fused(a[i], chi_l, d));
    a[i] = to_left_fused(lq.q, d);
    a[i - 1] = a[i - 1] * lq.l;
  }
  return Mps(n, d, std::move(a), center, state.log_norm());
}

double norm(const Mps& state) {
  const int c = state.canonical_center();
  if (c >= 0) return state.tensor(c).norm() * std::exp(state.log_norm());
  // Transfer contraction.
  const int d = state.phys_dim();
  MatC env = MatC::Ones(1, 1);
  for (int i = 0; i < state.n_sites(); ++i) {
    const MatC& a = state.tensor(i);
    MatC next = MatC::Zero(a.cols(), a.cols());
    for (int p = 0; p < d; ++p) {
      MatC s = phys_slice(a, d, p);
      next += s.adjoint() * env * s;
    }
    env = std::move(next);
  }
  return std::sqrt(std::abs(env(0, 0))) * std::exp(state.log_norm());
}

Mps normalized(const Mps& state) {
  Mps out = state;
  const double nr = norm(state);
  if (!(nr > 0.0)) throw std::domain_error("normalized: zero-norm state");
  // Scale only the center (or first) tensor so isometries stay intact.
  const int c = std::max(state.canonical_center(), 0);
  const double tensor_scale = nr * std::exp(-state.log_norm());
  const int keep_center = state.canonical_center();
  out.mutable_tensor(c) /= tensor_scale;
  out.set_center(keep_center);
  out.set_log_norm(0.0);
  return out;
}

cplx inner_product(const Mps& a, const Mps& b) {
  if (a.n_sites() != b.n_sites() || a.phys_dim() != b.phys_dim())
    throw structural_error("inner_product: shape mismatch");
  const int d = a.phys_dim();
  MatC env = MatC::Ones(1, 1);
  for (int i = 0; i < a.n_sites(); ++i) {
    const MatC& ta = a.tensor(i);
    const MatC& tb = b.tensor(i);
    MatC next = MatC::Zero(ta.cols(), tb.cols());
    for (int p = 0; p < d; ++p)
      next += phys_slice(ta, d, p).adjoint() * env * phys_slice(tb, d, p);
    env = std::move(next);
  }
  return env(0, 0) * std::exp(a.log_norm() + b.log_norm());
}

cplx expect_product_observable(const Mps& state, const ObservableProduct& obs) {
  if (obs.n_sites() != state.n_sites())
    throw structural_error("expect_product_observable: site count mismatch");
  if (obs.phys_dim() != state.phys_dim())
    throw structural_error("expect_product_observable: operator dimension != phys_dim");
  const int d = state.phys_dim();
  MatC env = MatC::Ones(1, 1);
  for (int i = 0; i < state.n_sites(); ++i) {
    const MatC& a = state.tensor(i);
    const MatC& op = obs.site_op(i);
    std::vector<MatC> slices(d);
    for (int p = 0; p < d; ++p) slices[p] = phys_slice(a, d, p);
    MatC next = MatC::Zero(a.cols(), a.cols());
    for (int po = 0; po < d; ++po) {
      MatC acted = MatC::Zero(a.rows() / d, a.cols());
      for (int pi = 0; pi < d; ++pi) acted += op(po, pi) * slices[pi];
      next += slices[po].adjoint() * env * acted;
    }
    env = std::move(next);
  }
  return env(0, 0) * std::exp(2.0 * state.log_norm());
}

double SchmidtSpectrum::tail_weight(long k) const {
  double w = 0.0;
  for (long i = k; i < static_cast<long>(coefficients.size()); ++i)
    w += coefficients[i] * coefficients[i];
  return w;
}

SchmidtSpectrum schmidt_spectrum(const Mps& state, int bond) {
  if (bond < 1 || bond >= state.n_sites())
    throw structural_error("schmidt_spectrum: bond out of range");
  Mps c = canonicalize(state, bond - 1);
  linalg::SvdResult svd = linalg::svd_thin(c.tensor(bond - 1));
  SchmidtSpectrum out;
  out.bond = bond;
  const double scale = std::exp(c.log_norm());
  out.coefficients.resize(svd.sigma.size());
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i)
    out.coefficients[i] = svd.sigma[i] * scale;
  return out;
}

GateResult apply_two_site_gate(const Mps& state, const MatC& gate, int site,
                               std::optional<long> bond_cap) {
  const int n = state.n_sites();
  const int d = state.phys_dim();
  if (site < 0 || site + 1 >= n)
    throw structural_error("apply_two_site_gate: sites (" + std::to_string(site) + "," +
                           std::to_string(site + 1) + ") not an adjacent pair in range");
  if (gate.rows() != d * d || gate.cols() != d * d)
    throw structural_error("apply_two_site_gate: gate shape mismatch");

  Mps c = (state.canonical_center() == site || state.canonical_center() == site + 1)
              ? state
              : canonicalize(state, site);

  const MatC& a0 = c.tensor(site);
  const MatC& a1 = c.tensor(site + 1);
  const long chi_l = a0.rows() / d;
  const long chi_m = a1.rows() / d;
  const long chi_r = a1.cols();
  // Theta: (chiL * d) x (d * chiR).
  MatC theta = a0 * to_right_fused(a1, chi_m, d);

  // Contract the gate with the two physical indices.
  MatC theta_g(chi_l * d, d * chi_r);
  for (long l = 0; l < chi_l; ++l) {
    for (long r = 0; r < chi_r; ++r) {
      for (int po = 0; po < d; ++po)
        for (int qo = 0; qo < d; ++qo) {
          cplx acc = 0.0;
          for (int pi = 0; pi < d; ++pi)
            for (int qi = 0; qi < d; ++qi)
              acc += gate(po * d + qo, pi * d + qi) * theta(l * d + pi, qi * chi_r + r);
          theta_g(l * d + po, qo * chi_r + r) = acc;
        }
    }
  }

  linalg::SvdResult svd = linalg::svd_thin(theta_g);
  const long k = kept_rank(svd.sigma, bond_cap);
  double total = 0.0, cut = 0.0;
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) {
    const double w = svd.sigma[i] * svd.sigma[i];
    total += w;
    if (i >= k) cut += w;
  }

  std::vector<MatC> tensors;
  tensors.reserve(n);
  for (int i = 0; i < n; ++i) tensors.push_back(c.tensor(i));
  tensors[site] = svd.u.leftCols(k);
  MatC sv = svd.sigma.head(k).asDiagonal() * svd.vdag.topRows(k);
  tensors[site + 1] = to_left_fused(sv, d);

  GateResult out{Mps(n, d, std::move(tensors), site + 1, c.log_norm()),
                 total > 0.0 ? cut / total : 0.0};
  return out;
}

Mps add_states(const std::vector<std::pair<cplx, Mps>>& terms) {
  if (terms.empty()) throw structural_error("add_states: empty term list");
  const int n = terms[0].second.n_sites();
  const int d = terms[0].second.phys_dim();
  for (const auto& [w, s] : terms) {
    if (s.n_sites() != n || s.phys_dim() != d)
      throw structural_error("add_states: mismatched shapes");
  }
  if (terms.size() == 1) {
    Mps out = terms[0].second;
    const cplx w = terms[0].first;
    if (w != cplx(1.0, 0.0)) {
      const int keep = out.canonical_center();
      out.mutable_tensor(std::max(keep, 0)) *= w;
      out.set_center(keep);
    }
    return out;
  }

  // Pull out the largest scale so block entries stay O(1).
  std::vector<cplx> coef(terms.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < terms.size(); ++t) {
    const double lw = std::log(std::abs(terms[t].first) + 1e-300) + terms[t].second.log_norm();
    max_log = std::max(max_log, lw);
  }
  if (!std::isfinite(max_log)) max_log = 0.0;
  for (size_t t = 0; t < terms.size(); ++t) {
    const cplx w = terms[t].first;
    const double mag = std::abs(w);
    const cplx phase = mag > 0.0 ? w / mag : cplx(0.0);
    coef[t] = phase * std::exp(std::log(mag + 1e-300) + terms[t].second.log_norm() - max_log);
  }

  std::vector<MatC> a(n);
  for (int i = 0; i < n; ++i) {
    long rows_l = 0, cols_r = 0;
    for (const auto& [w, s] : terms) {
      rows_l += s.tensor(i).rows() / d;
      cols_r += s.tensor(i).cols();
    }
    if (i == 0) rows_l = 1;
    if (i == n - 1) cols_r = 1;
    a[i] = MatC::Zero(rows_l * d, cols_r);
    long off_l = 0, off_r = 0;
    for (size_t t = 0; t < terms.size(); ++t) {
      const MatC& src = terms[t].second.tensor(i);
      const long cl = src.rows() / d;
      const long cr = src.cols();
      const cplx scale = (i == 0) ? coef[t] : cplx(1.0);
      for (long l = 0; l < cl; ++l)
        for (int p = 0; p < d; ++p)
          for (long r = 0; r < cr; ++r)
            a[i]((off_l + l) * d + p, off_r + r) = scale * src(l * d + p, r);
      if (i != 0) off_l += cl;
      if (i != n - 1) off_r += cr;
    }
  }
  return Mps(n, d, std::move(a), -1, max_log);
}

std::pair<Mps, TruncationReport> truncate_to_bond(const Mps& state, long k_max) {
  if (k_max < 1) throw structural_error("truncate_to_bond: k_max must be >= 1");
  const int n = state.n_sites();
  const int d = state.phys_dim();

  // Right-canonicalize first: collapses redundant ranks and makes each
  // left-to-right SVD expose the Schmidt coefficients of its bond.
  Mps rc = canonicalize(state, 0);
  const Mps input_compact = rc;  // same vector, cheap to contract against

  std::vector<MatC> a;
  a.reserve(n);
  for (int i = 0; i < n; ++i) a.push_back(rc.tensor(i));

  TruncationReport report;
  report.discarded.assign(std::max(n - 1, 0), 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    linalg::SvdResult svd = linalg::svd_thin(a[i]);
    const long k = kept_rank(svd.sigma, k_max);
    double total = 0.0, cut = 0.0;
    for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) {
      const double w = svd.sigma[j] * svd.sigma[j];
      total += w;
      if (j >= k) cut += w;
    }
    report.discarded[i] = total > 0.0 ? cut / total : 0.0;
    a[i] = svd.u.leftCols(k);
    MatC carry = svd.sigma.head(k).asDiagonal() * svd.vdag.topRows(k);
    const long chi_m = a[i + 1].rows() / d;
    a[i + 1] = to_left_fused(carry * to_right_fused(a[i + 1], chi_m, d), d);
  }

  Mps out(n, d, std::move(a), n - 1, rc.log_norm());
  report.max_discarded = 0.0;
  for (double w : report.discarded) report.max_discarded = std::max(report.max_discarded, w);
  report.bound_rhs = 8.0 * (n - 1) * report.max_discarded;

  // Realized |psi_out - psi_in|^2 with the output renormalized (the
  // paper's Z^-1) and the input as given; cheap against the compacted
  // input unless bonds are still huge.
  Mps out_n = normalized(out);
  const double cost = static_cast<double>(n) * d * out_n.max_bond() *
                      static_cast<double>(input_compact.max_bond()) *
                      static_cast<double>(input_compact.max_bond());
  if (cost <= 2e9) {
    const double in_norm = norm(input_compact);
    if (in_norm > 0.0) {
      const cplx ov = inner_product(out_n, input_compact) / in_norm;
      report.realized_error = std::max(0.0, 2.0 - 2.0 * ov.real());
    }
  } else {
    report.realized_error = std::numeric_limits<double>::quiet_NaN();
  }
  return {std::move(out_n), std::move(report)};
}

VecC to_dense(const Mps& state, long max_dim) {
  const int n = state.n_sites();
  const int d = state.phys_dim();
  double dim_check = 1.0;
  for (int i = 0; i < n; ++i) dim_check *= d;
  if (dim_check > static_cast<double>(max_dim))
    throw range_error("to_dense: dimension " + std::to_string(dim_check) +
                      " exceeds guard " + std::to_string(max_dim));
  // Row vector over accumulated physical indices x current bond.
  MatC acc = MatC::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    const MatC& a = state.tensor(i);
    const long chi_l = a.rows() / d;
    const long chi_r = a.cols();
    MatC next(acc.rows() * d, chi_r);
    for (long x = 0; x < acc.rows(); ++x)
      for (int p = 0; p < d; ++p) {
        Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(chi_r);
        for (long l = 0; l < chi_l; ++l) row += acc(x, l) * a.row(l * d + p);
        next.row(x * d + p) = row;
      }
    acc = std::move(next);
  }
  return acc.col(0) * std::exp(state.log_norm());
}

Mps random_mps(int n_sites, int phys_dim, long chi, std::mt19937_64& rng) {
  if (n_sites < 1 || phys_dim < 1 || chi < 1)
    throw structural_error("random_mps: invalid parameters");
  std::normal_distribution<double> g(0.0, 1.0);
  // Bond j is capped by chi and by what the open chain supports.
  std::vector<long> bonds(n_sites + 1, 1);
  for (int j = 1; j < n_sites; ++j) {
    long cap = chi;
    long side = 1;
    for (int k = 0; k < j && side < cap; ++k) side *= phys_dim;
    cap = std::min(cap, side);
    side = 1;
    for (int k = j; k < n_sites && side < cap; ++k) side *= phys_dim;
    bonds[j] = std::min(cap, side);
  }
  std::vector<MatC> a(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    a[i].resize(bonds[i] * phys_dim, bonds[i + 1]);
    for (long r = 0; r < a[i].rows(); ++r)
      for (long c = 0; c < a[i].cols(); ++c) a[i](r, c) = cplx(g(rng), g(rng));
  }
  Mps s(n_sites, phys_dim, std::move(a));
  return normalized(canonicalize(s, 0));
}

ObservableProduct::ObservableProduct(int n_sites, int phys_dim) : d_(phys_dim) {
  if (n_sites < 1) throw structural_error("ObservableProduct: need at least one site");
  ops_.assign(n_sites, MatC::Identity(phys_dim, phys_dim));
  norms_.assign(n_sites, 1.0);
}

void ObservableProduct::set_site_op(int site, const MatC& op) {
  if (site < 0 || site >= static_cast<int>(ops_.size()))
    throw structural_error("ObservableProduct: site out of range");
  if (op.rows() != d_ || op.cols() != d_)
    throw structural_error("ObservableProduct: operator dimension != phys_dim");
  ops_[site] = op;
  norms_[site] = op.jacobiSvd().singularValues()(0);
}

std::string debug_dump(const Mps& state) {
  std::ostringstream os;
  os << "mps n_sites=" << state.n_sites() << " phys_dim=" << state.phys_dim()
     << " center=" << state.canonical_center() << " log_norm=" << state.log_norm() << "\n";
  os << "bonds:";
  for (int b = 0; b <= state.n_sites(); ++b) os << " " << state.bond_dim(b);
  os << "\n";
  for (int b = 1; b < state.n_sites(); ++b) {
    SchmidtSpectrum sp = schmidt_spectrum(state, b);
    os << "schmidt bond=" << b << ":";
    for (size_t i = 0; i < std::min<size_t>(sp.coefficients.size(), 8); ++i)
      os << " " << sp.coefficients[i];
    if (sp.coefficients.size() > 8) os << " ...";
    os << "\n";
  }
  return os.str();
}

}  // namespace mpstrack
