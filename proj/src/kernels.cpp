#include "mpstrack/kernels.hpp"

#include <algorithm>
#include <atomic>

#include <omp.h>

namespace mpstrack::kernels {

namespace {
std::atomic<Mode> g_mode{Mode::Parallel};

// One bond contribution, restricted to the outer-index range [lo, hi).
// The outer index enumerates (left, right) blocks; the d x d two-site
// block in the middle is dense per outer index. Every y element is
// written by exactly one call, with a fixed summation order, so the
// split over threads does not change the floating-point result.
void bond_pass(const MatC& h, long n_right, int d, const VecC& x, VecC& y, long lo, long hi) {
  const int d2 = d * d;
  const long mid_stride = n_right;
  const long p_stride = d * n_right;
  const long left_stride = d2 * n_right;
  for (long o = lo; o < hi; ++o) {
    const long l = o / n_right;
    const long r = o % n_right;
    const long base = l * left_stride + r;
    for (int pq_out = 0; pq_out < d2; ++pq_out) {
      const int p_out = pq_out / d;
      const int q_out = pq_out % d;
      cplx acc = 0.0;
      for (int pq_in = 0; pq_in < d2; ++pq_in) {
        const int p_in = pq_in / d;
        const int q_in = pq_in % d;
        acc += h(pq_out, pq_in) * x[base + p_in * p_stride + q_in * mid_stride];
      }
      y[base + p_out * p_stride + q_out * mid_stride] += acc;
    }
  }
}
}  // namespace

Mode default_mode() { return g_mode.load(); }
void set_default_mode(Mode m) { g_mode.store(m); }

void apply_bond_terms(const std::vector<MatC>& terms, int n_sites, int phys_dim,
                      const VecC& x, VecC& y, Mode mode) {
  const int n = n_sites;
  const int d = phys_dim;
  long dim = 1;
  for (int i = 0; i < n; ++i) dim *= d;
  if (x.size() != dim) throw structural_error("apply_bond_terms: state dimension mismatch");
  if (static_cast<int>(terms.size()) != n - 1)
    throw structural_error("apply_bond_terms: expected one term per bond");
  y.setZero(dim);
  for (int b = 0; b < n - 1; ++b) {
    if (terms[b].rows() != d * d || terms[b].cols() != d * d)
      throw structural_error("apply_bond_terms: term dimension mismatch at bond " +
                             std::to_string(b));
    long n_right = 1;
    for (int i = b + 2; i < n; ++i) n_right *= d;
    const long outer = dim / (d * d);
    if (mode == Mode::Parallel && outer >= 64) {
#pragma omp parallel
      {
        const long nth = omp_get_num_threads();
        const long tid = omp_get_thread_num();
        const long chunk = (outer + nth - 1) / nth;
        const long lo = std::min(outer, tid * chunk);
        const long hi = std::min(outer, lo + chunk);
        bond_pass(terms[b], n_right, d, x, y, lo, hi);
      }
    } else {
      bond_pass(terms[b], n_right, d, x, y, 0, outer);
    }
  }
}

VecC apply_bond_terms(const std::vector<MatC>& terms, int n_sites, int phys_dim,
                      const VecC& x, Mode mode) {
  VecC y;
  apply_bond_terms(terms, n_sites, phys_dim, x, y, mode);
  return y;
}

}  // namespace mpstrack::kernels
