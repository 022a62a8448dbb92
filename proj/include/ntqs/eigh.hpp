// eigh.hpp
// Dense symmetric eigensolvers generic over the scalar type: cyclic Jacobi
// (eigenvalues and vectors) and Householder tridiagonalization followed by
// implicit QL (eigenvalues only, used for large matrices).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ntqs/errors.hpp"
#include "ntqs/real.hpp"

namespace ntqs {

inline constexpr std::size_t max_eigen_dim = std::size_t{1} << 14;

// Square row-major matrix.
template <class Real>
struct dense_matrix {
  std::size_t dim = 0;
  std::vector<Real> a;

  dense_matrix() = default;
  explicit dense_matrix(std::size_t n) : dim(n), a(n * n, Real(0)) {}

  Real& operator()(std::size_t i, std::size_t j) { return a[i * dim + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return a[i * dim + j]; }

  static dense_matrix identity(std::size_t n) {
    dense_matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Real trace() const {
    compensated_sum<Real> s;
    for (std::size_t i = 0; i < dim; ++i) s += (*this)(i, i);
    return s.value();
  }

  Real frobenius() const {
    using std::sqrt;
    compensated_sum<Real> s;
    for (const auto& x : a) s += x * x;
    return sqrt(s.value());
  }
};

template <class Real>
dense_matrix<Real> multiply(const dense_matrix<Real>& x, const dense_matrix<Real>& y) {
  if (x.dim != y.dim) throw domain_error("matrix dimension mismatch");
  const std::size_t n = x.dim;
  dense_matrix<Real> z(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Real xik = x(i, k);
      if (xik == 0) continue;
      for (std::size_t j = 0; j < n; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

enum class eigen_method { automatic, jacobi, tridiagonal_ql };

template <class Real>
struct SpectrumResult {
  std::vector<Real> eigenvalues;                        // ascending
  std::vector<std::pair<Real, std::size_t>> clusters;   // (mean value, multiplicity)
  Real offdiag_residual = 0;
  int sweeps = 0;
  std::size_t dim = 0;
  Real input_norm = 0;  // Frobenius norm of the input
  std::string method;
  std::optional<dense_matrix<Real>> vectors;  // column j pairs with eigenvalues[j]
};

inline constexpr double cluster_relative_gap = 1e-6;

// Consecutive sorted eigenvalues whose relative gap is below 1e-6 share a cluster.
template <class Real>
std::vector<std::pair<Real, std::size_t>> degeneracy_clusters(const std::vector<Real>& sorted) {
  using std::abs;
  std::vector<std::pair<Real, std::size_t>> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    compensated_sum<Real> s;
    for (std::size_t i = start; i < end; ++i) s += sorted[i];
    out.emplace_back(s.value() / from_int<Real>(static_cast<std::int64_t>(end - start)), end - start);
  };
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const Real scale = std::max(abs(sorted[i]), abs(sorted[i - 1]));
    if (abs(sorted[i] - sorted[i - 1]) > Real(cluster_relative_gap) * scale) {
      flush(i);
      start = i;
    }
  }
  if (!sorted.empty()) flush(sorted.size());
  return out;
}

namespace detail {

template <class Real>
Real offdiag_norm(const dense_matrix<Real>& A) {
  using std::sqrt;
  compensated_sum<Real> s;
  for (std::size_t i = 0; i < A.dim; ++i)
    for (std::size_t j = 0; j < A.dim; ++j)
      if (i != j) s += A(i, j) * A(i, j);
  return sqrt(s.value());
}

// Cyclic row-by-row Jacobi. A is overwritten; V accumulates rotations if given.
template <class Real>
void jacobi(dense_matrix<Real>& A, dense_matrix<Real>* V, const Real& target, Real& residual, int& sweeps) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = A.dim;
  for (sweeps = 0;; ++sweeps) {
    residual = offdiag_norm(A);
    if (residual <= target) return;
    if (sweeps == 100) throw convergence_error("Jacobi did not converge in 100 sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real apq = A(p, q);
        if (apq == 0) continue;
        const Real tau = (A(q, q) - A(p, p)) / (2 * apq);
        const Real t = (tau >= 0 ? Real(1) : Real(-1)) / (abs(tau) + sqrt(1 + tau * tau));
        const Real c = 1 / sqrt(1 + t * t);
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Real akp = A(k, p), akq = A(k, q);
          const Real np = c * akp - s * akq;
          const Real nq = s * akp + c * akq;
          A(k, p) = np;
          A(p, k) = np;
          A(k, q) = nq;
          A(q, k) = nq;
        }
        A(p, p) -= t * apq;
        A(q, q) += t * apq;
        A(p, q) = 0;
        A(q, p) = 0;
        if (V) {
          for (std::size_t k = 0; k < n; ++k) {
            const Real vkp = (*V)(k, p), vkq = (*V)(k, q);
            (*V)(k, p) = c * vkp - s * vkq;
            (*V)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
}

// Householder reduction to tridiagonal form (d diagonal, e sub-diagonal).
// Works on the upper triangle of the row-major array, i.e. the lower
// triangle read by columns, so every inner loop is contiguous.
template <class Real>
void tridiagonalize(std::vector<Real>& a, std::size_t n, std::vector<Real>& d, std::vector<Real>& e) {
  using std::sqrt;
  d.assign(n, Real(0));
  e.assign(n, Real(0));
  std::vector<Real> v(n), p(n);
  for (std::size_t j = 0; j + 2 < n; ++j) {
    Real* row = &a[j * n];
    d[j] = row[j];
    // Reflector for x = row[j+1 .. n-1].
    Real sigma = 0;
    for (std::size_t k = j + 2; k < n; ++k) sigma += row[k] * row[k];
    const Real x0 = row[j + 1];
    if (sigma == 0) {
      e[j] = x0;
      continue;
    }
    const Real mu = sqrt(x0 * x0 + sigma);
    const Real v0 = x0 <= 0 ? x0 - mu : -sigma / (x0 + mu);
    const Real beta = 2 * v0 * v0 / (sigma + v0 * v0);
    e[j] = mu;
    v[j + 1] = 1;
    for (std::size_t k = j + 2; k < n; ++k) v[k] = row[k] / v0;

    // p = beta * T v over the trailing block, symmetric from its upper triangle.
    std::fill(p.begin() + static_cast<std::ptrdiff_t>(j + 1), p.end(), Real(0));
    for (std::size_t r = j + 1; r < n; ++r) {
      const Real* ar = &a[r * n];
      const Real vr = v[r];
      Real s = ar[r] * vr;
      for (std::size_t c = r + 1; c < n; ++c) {
        s += ar[c] * v[c];
        p[c] += ar[c] * vr;
      }
      p[r] += s;
    }
    Real pv = 0;
    for (std::size_t k = j + 1; k < n; ++k) {
      p[k] *= beta;
      pv += p[k] * v[k];
    }
    const Real K = beta * pv / 2;
    for (std::size_t k = j + 1; k < n; ++k) p[k] -= K * v[k];  // p now holds w
    for (std::size_t r = j + 1; r < n; ++r) {
      Real* ar = &a[r * n];
      const Real vr = v[r], wr = p[r];
      for (std::size_t c = r; c < n; ++c) ar[c] -= vr * p[c] + wr * v[c];
    }
  }
  if (n >= 2) {
    d[n - 2] = a[(n - 2) * n + n - 2];
    e[n - 2] = a[(n - 2) * n + n - 1];
  }
  if (n >= 1) d[n - 1] = a[(n - 1) * n + n - 1];
}

// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
template <class Real>
void tridiagonal_ql(std::vector<Real>& d, std::vector<Real>& e, Real& residual, int& iterations) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = d.size();
  const Real eps = exp2i<Real>(1 - significand_bits<Real>());
  auto hypot2 = [](const Real& x, const Real& y) {
    using std::abs;
    using std::sqrt;
    const Real ax = abs(x), ay = abs(y);
    if (ax > ay) {
      const Real r = ay / ax;
      return ax * sqrt(1 + r * r);
    }
    if (ay == 0) return Real(0);
    const Real r = ax / ay;
    return ay * sqrt(1 + r * r);
  };
  compensated_sum<Real> neglected;
  iterations = 0;
  if (n > 0) e[n - 1] = 0;
  // Absolute floor for deflation; without it blocks of (near) zero
  // eigenvalues never satisfy the relative test.
  Real tnorm = 0;
  for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, Real(abs(d[i]) + abs(e[i]) + (i ? abs(e[i - 1]) : Real(0))));
  const Real floor_tol = eps * tnorm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const Real dd = abs(d[m]) + abs(d[m + 1]);
        if (abs(e[m]) <= eps * dd || abs(e[m]) <= floor_tol) break;
      }
      if (m == l) break;
      if (++iter > 60) throw convergence_error("tridiagonal QL did not converge");
      ++iterations;
      Real g = (d[l + 1] - d[l]) / (2 * e[l]);
      Real r = hypot2(g, Real(1));
      g = d[m] - d[l] + e[l] / (g + (g >= 0 ? abs(r) : -abs(r)));
      Real s = 1, c = 1, p = 0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        Real f = s * e[i];
        const Real b = c * e[i];
        r = hypot2(f, g);
        e[i + 1] = r;
        if (r == 0) {
          d[i + 1] -= p;
          e[m] = 0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0;
    } while (true);
    if (l + 1 < n) {
      neglected += e[l] * e[l];
      e[l] = 0;
    }
  }
  residual = sqrt(neglected.value());
}

}  // namespace detail

// Eigen-decomposition of a symmetric matrix at the precision of Real.
//
// Rows and columns that are exactly zero are split off first (they carry
// exact zero eigenvalues); the rest goes to Jacobi when vectors are wanted or
// the block is small, otherwise to tridiagonal QL.
template <class Real>
SpectrumResult<Real> symmetric_eigen(const dense_matrix<Real>& M, bool want_vectors = false,
                                     eigen_method method = eigen_method::automatic) {
  using std::abs;
  const std::size_t n = M.dim;
  if (n == 0) throw domain_error("empty matrix");
  if (n > max_eigen_dim) throw capacity_error("eigensolver limited to dimension 2^14");
  const int bits = significand_bits<Real>();
  SpectrumResult<Real> res;
  res.dim = n;
  res.input_norm = M.frobenius();
  const Real sym_tol = exp2i<Real>(12 - bits) * res.input_norm;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (abs(M(i, j) - M(j, i)) > sym_tol) throw domain_error("matrix is not symmetric");

  std::vector<std::size_t> active, idle;
  for (std::size_t i = 0; i < n; ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < n && zero; ++j) zero = M(i, j) == 0;
    (zero ? idle : active).push_back(i);
  }
  const std::size_t k = active.size();

  if (method == eigen_method::automatic)
    method = (want_vectors || k <= 64) ? eigen_method::jacobi : eigen_method::tridiagonal_ql;
  if (want_vectors && method != eigen_method::jacobi)
    throw domain_error("eigenvectors are only produced by the Jacobi path");
  res.method = method == eigen_method::jacobi ? "jacobi" : "tridiagonal_ql";

  std::vector<Real> vals;
  dense_matrix<Real> Vsub;
  if (k > 0) {
    dense_matrix<Real> A(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) A(i, j) = (M(active[i], active[j]) + M(active[j], active[i])) / 2;
    const Real target = exp2i<Real>(12 - bits) * res.input_norm;
    if (method == eigen_method::jacobi) {
      if (want_vectors) Vsub = dense_matrix<Real>::identity(k);
      detail::jacobi(A, want_vectors ? &Vsub : nullptr, target, res.offdiag_residual, res.sweeps);
      vals.resize(k);
      for (std::size_t i = 0; i < k; ++i) vals[i] = A(i, i);
    } else {
      std::vector<Real> d, e;
      detail::tridiagonalize(A.a, k, d, e);
      A = dense_matrix<Real>();
      detail::tridiagonal_ql(d, e, res.offdiag_residual, res.sweeps);
      vals = std::move(d);
    }
  }

  // Merge with the exact zeros and sort ascending.
  std::vector<std::pair<Real, std::size_t>> order;  // (value, column source)
  order.reserve(n);
  for (std::size_t i = 0; i < k; ++i) order.emplace_back(vals[i], i);
  for (std::size_t i = 0; i < idle.size(); ++i) order.emplace_back(Real(0), k + i);
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  res.eigenvalues.reserve(n);
  for (const auto& o : order) res.eigenvalues.push_back(o.first);

  if (want_vectors) {
    dense_matrix<Real> V(n);
    for (std::size_t col = 0; col < n; ++col) {
      const std::size_t src = order[col].second;
      if (src < k) {
        for (std::size_t i = 0; i < k; ++i) V(active[i], col) = Vsub(i, src);
      } else {
        V(idle[src - k], col) = 1;
      }
    }
    res.vectors = std::move(V);
  }
  res.clusters = degeneracy_clusters(res.eigenvalues);
  return res;
}

// Spectrum of the Hermitian matrix Re + i Im through its real embedding
// [[Re, -Im], [Im, Re]], whose eigenvalues are those of the input, doubled.
template <class Real>
std::vector<Real> hermitian_eigenvalues(const dense_matrix<Real>& re, const dense_matrix<Real>& im) {
  const std::size_t n = re.dim;
  if (im.dim != n) throw domain_error("real and imaginary parts differ in size");
  dense_matrix<Real> E(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      E(i, j) = re(i, j);
      E(i + n, j + n) = re(i, j);
      E(i, j + n) = -im(i, j);
      E(i + n, j) = im(i, j);
    }
  auto doubled = symmetric_eigen(E).eigenvalues;
  std::vector<Real> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (doubled[2 * i] + doubled[2 * i + 1]) / 2;
  return out;
}

// Eigenvalues at or below dim * 2^(15 - prec) * ||rho|| count as exact zeros.
template <class Real>
Real clamp_threshold(const SpectrumResult<Real>& s) {
  return from_int<Real>(static_cast<std::int64_t>(s.dim)) * exp2i<Real>(15 - significand_bits<Real>()) * s.input_norm;
}

// Entanglement energies eps_k = -ln lambda_k (natural log), ascending.
template <class Real>
std::vector<Real> entanglement_spectrum(const SpectrumResult<Real>& s) {
  using std::log;
  const Real cut = clamp_threshold(s);
  std::vector<Real> out;
  for (const auto& l : s.eigenvalues)
    if (l > cut) out.push_back(-log(l));
  if (out.empty()) throw domain_error("every eigenvalue is below the clamp threshold");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ntqs
