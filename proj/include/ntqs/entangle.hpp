// entangle.hpp
// Reduced density matrices of NumberStates for natural bi-partitions, built
// from exact integer co-occurrence counts, and the analytic model matrices
// (Hardy-Littlewood Toeplitz, arithmetic and composite variants, Ramanujan
// matrices).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ntqs/eigh.hpp"
#include "ntqs/errors.hpp"
#include "ntqs/numtheory.hpp"
#include "ntqs/real.hpp"
#include "ntqs/states.hpp"

namespace ntqs {

inline constexpr std::uint64_t max_subsystem_dim = std::uint64_t{1} << 14;

enum class provenance {
  exact_partial_trace,
  hl_model,         // (1/d)(I + l_N C_m)
  arith_model,      // arithmetic-progression variant, parameter alpha
  composite_model,  // (1/d)(I + P_m)
  hl_matrix,        // C_m or C_D, zero diagonal
  ramanujan_tilde,  // tilde C_D, parameter D
};

inline std::string provenance_name(provenance p) {
  switch (p) {
    case provenance::exact_partial_trace: return "exact_partial_trace";
    case provenance::hl_model: return "hl_model";
    case provenance::arith_model: return "arith_model";
    case provenance::composite_model: return "composite_model";
    case provenance::hl_matrix: return "hl_matrix";
    case provenance::ramanujan_tilde: return "ramanujan_tilde";
  }
  return "unknown";
}

template <class Real>
struct DensityMatrix {
  dense_matrix<Real> entries;
  provenance source = provenance::exact_partial_trace;
  std::int64_t parameter = 0;  // alpha for arith_model, D for ramanujan_tilde
  int trace_target = 1;        // 1 for density matrices, 0 for C-matrices

  std::size_t dim() const { return entries.dim; }
};

// Which side of the cut the reduced matrix lives on: the m least significant
// digits, or the remaining n - m.
enum class subsystem { low, high };

// Integer Gram matrix of the signed incidence between kept and traced digits.
struct GramCounts {
  std::size_t dim = 0;
  std::vector<std::int64_t> counts;  // row-major dim x dim
  std::uint64_t support = 0;         // normalization |support|
};

namespace detail {

inline std::uint64_t pow_u(unsigned q, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= q;
  return r;
}

}  // namespace detail

// Co-occurrence counts G(a, b) = sum_h s(h, a) s(h, b) over traced index h.
inline GramCounts partial_trace_counts(const NumberState& st, unsigned m, subsystem side = subsystem::low) {
  if (m < 1 || m >= st.n()) throw domain_error("bi-partition size must satisfy 1 <= m < n");
  const std::uint64_t low = detail::pow_u(st.q(), m);
  const std::uint64_t high = detail::pow_u(st.q(), st.n() - m);
  const std::uint64_t dim = side == subsystem::low ? low : high;
  const std::uint64_t blocks = side == subsystem::low ? high : low;
  if (dim > max_subsystem_dim) throw capacity_error("reduced density matrix dimension exceeds 2^14");
  for (auto v : st.values())
    if (v >= low * high) throw domain_error("support value outside the register");

  // Group entries (kept index, sign) by traced index.
  std::vector<std::uint64_t> start(blocks + 1, 0);
  auto kept = [&](std::uint64_t v) { return side == subsystem::low ? v % low : v / low; };
  auto traced = [&](std::uint64_t v) { return side == subsystem::low ? v / low : v % low; };
  for (auto v : st.values()) ++start[traced(v) + 1];
  for (std::uint64_t b = 0; b < blocks; ++b) start[b + 1] += start[b];
  std::vector<std::pair<std::uint32_t, std::int8_t>> entries(st.size());
  {
    auto fill = start;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const auto v = st.values()[i];
      entries[fill[traced(v)]++] = {static_cast<std::uint32_t>(kept(v)), st.signs()[i]};
    }
  }

  GramCounts g;
  g.dim = dim;
  g.support = st.size();
  g.counts.assign(dim * dim, 0);

  double pair_work = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const double c = static_cast<double>(start[b + 1] - start[b]);
    pair_work += c * c / 2;
  }
  const double dense_work = static_cast<double>(dim) * static_cast<double>(dim) * static_cast<double>(blocks) / 16;

  if (pair_work <= dense_work || blocks > (std::uint64_t{1} << 24)) {
    for (std::uint64_t b = 0; b < blocks; ++b) {
      for (auto i = start[b]; i < start[b + 1]; ++i) {
        const auto [a, sa] = entries[i];
        std::int64_t* row = &g.counts[static_cast<std::size_t>(a) * dim];
        for (auto j = i; j < start[b + 1]; ++j) row[entries[j].first] += sa * entries[j].second;
      }
    }
    // Entries sit in the upper triangle when kept indices ascend within a block;
    // fold both triangles into a symmetric matrix.
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = a + 1; b < dim; ++b) {
        const auto s = g.counts[a * dim + b] + g.counts[b * dim + a];
        g.counts[a * dim + b] = s;
        g.counts[b * dim + a] = s;
      }
  } else {
    // Dense incidence product; integer entries stay exact in double below 2^53.
    Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(blocks));
    for (std::uint64_t b = 0; b < blocks; ++b)
      for (auto i = start[b]; i < start[b + 1]; ++i)
        inc(entries[i].first, static_cast<Eigen::Index>(b)) = entries[i].second;
    Eigen::MatrixXd G = inc * inc.transpose();
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        g.counts[a * dim + b] = static_cast<std::int64_t>(std::llround(G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))));
  }
  return g;
}

template <class Real>
DensityMatrix<Real> density_from_counts(const GramCounts& g) {
  DensityMatrix<Real> rho;
  rho.entries = dense_matrix<Real>(g.dim);
  const Real denom = from_int<Real>(static_cast<std::int64_t>(g.support));
  for (std::size_t i = 0; i < g.counts.size(); ++i)
    if (g.counts[i] != 0) rho.entries.a[i] = from_int<Real>(g.counts[i]) / denom;
  rho.source = provenance::exact_partial_trace;
  return rho;
}

// rho_A over the m least significant digits (or rho_B over the rest).
template <class Real>
DensityMatrix<Real> reduced_density(const NumberState& st, unsigned m, subsystem side = subsystem::low) {
  return density_from_counts<Real>(partial_trace_counts(st, m, side));
}

// Reduced density matrix of a dense random state, as real and imaginary parts.
template <class Real>
struct ComplexDensity {
  dense_matrix<Real> re, im;
};

template <class Real>
ComplexDensity<Real> reduced_density(const RandomState& st, unsigned m) {
  if (m < 1 || m >= st.n) throw domain_error("bi-partition size must satisfy 1 <= m < n");
  const std::uint64_t dim = detail::pow_u(st.q, m), blocks = detail::pow_u(st.q, st.n - m);
  if (dim > max_subsystem_dim) throw capacity_error("reduced density matrix dimension exceeds 2^14");
  ComplexDensity<Real> rho{dense_matrix<Real>(dim), dense_matrix<Real>(dim)};
  for (std::uint64_t a = 0; a < dim; ++a)
    for (std::uint64_t b = a; b < dim; ++b) {
      compensated_sum<Real> re, im;
      for (std::uint64_t h = 0; h < blocks; ++h) {
        const std::uint64_t va = h * dim + a, vb = h * dim + b;
        const Real ar = Real(st.re[va]), ai = Real(st.im[va]), br = Real(st.re[vb]), bi = Real(st.im[vb]);
        // psi_a conj(psi_b)
        re += ar * br + ai * bi;
        im += ai * br - ar * bi;
      }
      rho.re(a, b) = rho.re(b, a) = re.value();
      rho.im(a, b) = im.value();
      rho.im(b, a) = -im.value();
    }
  return rho;
}

// ---------------------------------------------------------------------------
// Model matrices

// d x d Toeplitz matrix with entries (1 - delta_ij) C(step |i - j|).
template <class Real>
dense_matrix<Real> hl_toeplitz(std::size_t d, std::uint64_t step, const HLConstants<Real>& consts) {
  dense_matrix<Real> C(d);
  std::vector<Real> diag(d);
  for (std::size_t h = 1; h < d; ++h) diag[h] = consts(step * h);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) C(i, j) = diag[i > j ? i - j : j - i];
  return C;
}

// C_m, dimension d = 2^(m-1).
template <class Real>
DensityMatrix<Real> hl_model_matrix(unsigned m, const HLConstants<Real>& consts) {
  if (m < 2) throw domain_error("hl_model_matrix needs m >= 2");
  if (m > 15) throw capacity_error("hl_model_matrix dimension exceeds 2^14");
  DensityMatrix<Real> C;
  C.entries = hl_toeplitz((std::size_t{1} << (m - 1)), 2, consts);
  C.source = provenance::hl_matrix;
  C.trace_target = 0;
  return C;
}

// l_N = Li2(N) / Li(N), or its large-N form 1 / (n ln 2).
template <class Real>
Real ell_N(unsigned n, bool exact = true) {
  if (n < 2) throw domain_error("ell_N needs n >= 2");
  if (!exact) return Real(1) / (from_int<Real>(n) * ln2_v<Real>());
  const Real N = exp2i<Real>(static_cast<int>(n));
  return li2(N) / li(N);
}

// (1/d)(I + l_N C_m)
template <class Real>
DensityMatrix<Real> hl_model_density(unsigned n, unsigned m, const HLConstants<Real>& consts, bool exact_lN = true) {
  auto rho = hl_model_matrix(m, consts);
  const Real l = ell_N<Real>(n, exact_lN);
  const std::size_t d = rho.dim();
  const Real inv_d = Real(1) / from_int<Real>(static_cast<std::int64_t>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) rho.entries(i, j) = (i == j ? Real(1) : l * rho.entries(i, j)) * inv_d;
  rho.source = provenance::hl_model;
  rho.trace_target = 1;
  return rho;
}

// (phi(alpha)/d)(I + l_N C_m(alpha)) on the d/phi(alpha) = 2^m/alpha residues
// compatible with one class beta mod alpha; alpha = 2 gives hl_model_density.
template <class Real>
DensityMatrix<Real> arithmetic_model(unsigned n, unsigned m, std::uint64_t alpha, const HLConstants<Real>& consts,
                                     bool exact_lN = true) {
  if (alpha < 2 || (alpha & (alpha - 1)) != 0) throw domain_error("alpha must be a power of 2");
  if ((std::uint64_t{1} << m) < alpha) throw domain_error("2^m must be at least alpha");
  if (m > 15) throw capacity_error("arithmetic_model dimension exceeds 2^14");
  const std::size_t dim = (std::size_t{1} << m) / alpha;
  DensityMatrix<Real> rho;
  rho.entries = hl_toeplitz(dim, alpha, consts);
  const Real l = ell_N<Real>(n, exact_lN);
  // phi(alpha) / 2^(m-1) = 1 / dim for alpha a power of two.
  const Real pref = from_int<Real>(static_cast<std::int64_t>(totient(alpha))) /
                    from_int<Real>(static_cast<std::int64_t>(std::uint64_t{1} << (m - 1)));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) rho.entries(i, j) = (i == j ? Real(1) : l * rho.entries(i, j)) * pref;
  rho.source = provenance::arith_model;
  rho.parameter = static_cast<std::int64_t>(alpha);
  return rho;
}

// (1/d)(I + P_m) with P_m the all-ones off-diagonal matrix: J/d.
template <class Real>
DensityMatrix<Real> composite_model(unsigned m) {
  if (m < 1) throw domain_error("composite_model needs m >= 1");
  if (m > 15) throw capacity_error("composite_model dimension exceeds 2^14");
  const std::size_t d = std::size_t{1} << (m - 1);
  DensityMatrix<Real> rho;
  rho.entries = dense_matrix<Real>(d);
  const Real v = Real(1) / from_int<Real>(static_cast<std::int64_t>(d));
  for (auto& x : rho.entries.a) x = v;
  rho.source = provenance::composite_model;
  return rho;
}

// ---------------------------------------------------------------------------
// Ramanujan matrices

inline void require_odd_squarefree(std::uint64_t D) {
  if (D < 1 || (D & 1) == 0 || mobius(D) == 0) throw domain_error("D must be odd and square-free");
}

inline std::vector<std::uint64_t> divisors(std::uint64_t D) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t k = 1; k * k <= D; ++k)
    if (D % k == 0) {
      out.push_back(k);
      if (k * k != D) out.push_back(D / k);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// R_{k,D}: entries (1 - delta_ij) c_k(2 |i - j|).
inline dense_matrix<std::int64_t> ramanujan_matrix(std::uint64_t k, std::uint64_t D) {
  require_odd_squarefree(D);
  if (k < 1) throw domain_error("k must be >= 1");
  dense_matrix<std::int64_t> R(D);
  for (std::uint64_t i = 0; i < D; ++i)
    for (std::uint64_t j = 0; j < D; ++j)
      if (i != j) R(i, j) = ramanujan_sum(k, 2 * static_cast<std::int64_t>(i > j ? i - j : j - i));
  return R;
}

// r_{k,D}(a) = sum_{h=1}^{D} c_k(2h) e^{-2 pi i h a / D}, a = 1..D: the
// spectrum of the circulant tilde R_{k,D} = R_{k,D} + phi(k) I for k | D.
// The Fourier sum is evaluated in floating point and must land on integers.
inline std::vector<std::int64_t> ramanujan_fourier_eigenvalues(std::uint64_t k, std::uint64_t D) {
  require_odd_squarefree(D);
  if (D % k != 0) throw domain_error("k must divide D");
  std::vector<std::int64_t> out(D);
  const long double two_pi = 6.283185307179586476925286766559005768L;
  for (std::uint64_t a = 1; a <= D; ++a) {
    long double re = 0, im = 0;
    for (std::uint64_t h = 1; h <= D; ++h) {
      const auto c = static_cast<long double>(ramanujan_sum(k, 2 * static_cast<std::int64_t>(h)));
      const long double ph = -two_pi * static_cast<long double>((h * a) % D) / static_cast<long double>(D);
      re += c * std::cos(ph);
      im += c * std::sin(ph);
    }
    const auto r = std::llround(re);
    if (std::fabs(re - static_cast<long double>(r)) > 1e-6L * D || std::fabs(im) > 1e-6L * D)
      throw convergence_error("Ramanujan Fourier sum is not integral");
    out[a - 1] = r;
  }
  return out;
}

// Rows k | D (ascending), columns a = 1..D: r_{k,D}(a) / D.
inline std::vector<std::pair<std::uint64_t, std::vector<int>>> ramanujan_eigen_table(std::uint64_t D) {
  std::vector<std::pair<std::uint64_t, std::vector<int>>> rows;
  for (auto k : divisors(D)) {
    auto r = ramanujan_fourier_eigenvalues(k, D);
    std::vector<int> row(D);
    for (std::uint64_t a = 0; a < D; ++a) {
      if (r[a] % static_cast<std::int64_t>(D) != 0) throw convergence_error("eigenvalue not a multiple of D");
      row[a] = static_cast<int>(r[a] / static_cast<std::int64_t>(D));
    }
    rows.emplace_back(k, std::move(row));
  }
  return rows;
}

// tilde C_D = 2 sum_{k | D} (mu(k)/phi(k))^2 R_{k,D}
template <class Real>
DensityMatrix<Real> tilde_C(std::uint64_t D) {
  require_odd_squarefree(D);
  dense_matrix<Real> C(D);
  for (auto k : divisors(D)) {
    const auto ph = static_cast<std::int64_t>(totient(k));
    const Real w = Real(2) / from_int<Real>(ph * ph);
    const auto R = ramanujan_matrix(k, D);
    for (std::size_t i = 0; i < R.a.size(); ++i)
      if (R.a[i] != 0) C.a[i] += w * from_int<Real>(R.a[i]);
  }
  DensityMatrix<Real> out;
  out.entries = std::move(C);
  out.source = provenance::ramanujan_tilde;
  out.parameter = static_cast<std::int64_t>(D);
  out.trace_target = 0;
  return out;
}

// Exact Hardy-Littlewood matrix C_D of dimension D.
template <class Real>
DensityMatrix<Real> hl_matrix_D(std::uint64_t D, const HLConstants<Real>& consts) {
  if (D < 1 || D > max_subsystem_dim) throw capacity_error("C_D dimension out of range");
  DensityMatrix<Real> C;
  C.entries = hl_toeplitz(D, 2, consts);
  C.source = provenance::hl_matrix;
  C.trace_target = 0;
  return C;
}

// ---------------------------------------------------------------------------
// Export

// One line per nonzero entry: row col value.
template <class Real>
void save_matrix_triplets(const DensityMatrix<Real>& rho, const std::filesystem::path& path) {
  detail::write_atomically(
      path,
      [&](std::ostream& os) {
        const auto& M = rho.entries;
        for (std::size_t i = 0; i < M.dim; ++i)
          for (std::size_t j = 0; j < M.dim; ++j)
            if (M(i, j) != 0) os << i << ' ' << j << ' ' << to_decimal(M(i, j)) << '\n';
      },
      std::ios::out);
}

// "NTQS3", u64 dim, u32 precision bits, then dim^2 row-major decimal
// strings, each terminated by '\n'.
template <class Real>
void save_matrix_binary(const DensityMatrix<Real>& rho, const std::filesystem::path& path) {
  detail::write_atomically(path, [&](std::ostream& os) {
    os.write("NTQS3", 5);
    detail::write_u64_le(os, rho.dim());
    const auto bits = static_cast<std::uint32_t>(significand_bits<Real>());
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>(bits >> (8 * i)));
    for (const auto& x : rho.entries.a) os << to_decimal(x) << '\n';
  });
}

template <class Real>
dense_matrix<Real> load_matrix_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  char magic[5];
  if (!is || !is.read(magic, 5) || std::string(magic, 5) != "NTQS3")
    throw domain_error("malformed matrix file " + path.string());
  std::uint64_t dim = 0;
  if (!detail::read_u64_le(is, dim) || dim > max_subsystem_dim) throw domain_error("malformed matrix file");
  char bits[4];
  if (!is.read(bits, 4)) throw domain_error("malformed matrix file");
  dense_matrix<Real> M(dim);
  std::string line;
  for (auto& x : M.a) {
    if (!std::getline(is, line)) throw domain_error("truncated matrix file");
    x = from_decimal<Real>(line);
  }
  return M;
}

}  // namespace ntqs
