// analysis.hpp
// Entropies of spectra, the analytic eigenvalue model of the Prime-state
// density matrix, trace powers of C_m, entropy-scaling estimators, the
// conjectured constants and a Fourier fit of the normalized entropy surface.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ntqs/eigh.hpp"
#include "ntqs/entangle.hpp"
#include "ntqs/errors.hpp"
#include "ntqs/numtheory.hpp"
#include "ntqs/real.hpp"
#include "ntqs/states.hpp"

namespace ntqs {

// ---------------------------------------------------------------------------
// Entropies (base 2)

namespace detail {

// Drops eigenvalues at or below cut and renormalizes the rest to sum 1.
template <class Real>
std::vector<Real> normalized_positive(const std::vector<Real>& eigs, const Real& cut) {
  std::vector<Real> kept;
  compensated_sum<Real> total;
  for (const auto& l : eigs)
    if (l > cut) {
      kept.push_back(l);
      total += l;
    }
  if (kept.empty()) throw domain_error("empty spectrum");
  const Real t = total.value();
  for (auto& l : kept) l /= t;
  return kept;
}

}  // namespace detail

template <class Real>
Real von_neumann(const std::vector<Real>& eigs, const Real& cut = Real(0)) {
  compensated_sum<Real> s;
  for (const auto& l : detail::normalized_positive(eigs, cut)) s += -l * log2_of(l);
  return s.value();
}

template <class Real>
Real renyi(const std::vector<Real>& eigs, int s, const Real& cut = Real(0)) {
  using std::pow;
  if (s < 2) throw domain_error("Renyi order must be >= 2");
  compensated_sum<Real> t;
  for (const auto& l : detail::normalized_positive(eigs, cut)) t += pow(l, s);
  return log2_of(t.value()) / from_int<Real>(1 - s);
}

// Entropy of a solved spectrum with the solver's clamp threshold.
template <class Real>
Real von_neumann(const SpectrumResult<Real>& spec) {
  return von_neumann(spec.eigenvalues, clamp_threshold(spec));
}

template <class Real>
Real renyi(const SpectrumResult<Real>& spec, int s) {
  return renyi(spec.eigenvalues, s, clamp_threshold(spec));
}

// H(p) = -p log2 p - (1 - p) log2 (1 - p)
template <class Real>
Real binary_entropy(const Real& p) {
  if (p <= 0 || p >= 1) return Real(0);
  return -p * log2_of(p) - (1 - p) * log2_of(Real(1 - p));
}

// S(m, n) of a NumberState from the exact partial trace. The smaller side of
// the cut is diagonalized; both sides share the nonzero spectrum.
template <class Real>
Real bipartition_entropy(const NumberState& st, unsigned m, eigen_method method = eigen_method::automatic) {
  const auto side = 2 * m <= st.n() ? subsystem::low : subsystem::high;
  const auto rho = reduced_density<Real>(st, m, side);
  return von_neumann(symmetric_eigen(rho.entries, false, method));
}

// ---------------------------------------------------------------------------
// Analytic spectrum of the Prime-state density matrix

template <class Real>
struct ModelEntry {
  std::uint64_t k = 0;             // odd square-free
  std::uint64_t phi = 0;           // phi(k)
  std::uint64_t multiplicity = 0;  // phi(k), padded for k = k_m
  Real gamma;                      // eigenvalue of C_m
  Real lambda;                     // eigenvalue of the density matrix
};

template <class Real>
struct ModelSpectrum {
  unsigned n = 0, m = 0;
  std::vector<ModelEntry<Real>> entries;  // ascending k
  std::uint64_t k_m = 0;
  std::uint64_t padding = 0;  // 2^(m-1) - A(k_m), added to the k_m multiplicity
  Real phi_m;

  // (lambda, total multiplicity), descending lambda. Entries with equal
  // phi(k) merge, which collects accidental degeneracies such as k = 13, 21.
  std::vector<std::pair<Real, std::uint64_t>> clusters() const {
    std::map<std::uint64_t, std::pair<Real, std::uint64_t>> by_phi;
    for (const auto& e : entries) {
      auto& c = by_phi[e.phi];
      c.first = e.lambda;
      c.second += e.multiplicity;
    }
    std::vector<std::pair<Real, std::uint64_t>> out;
    for (const auto& [phi, c] : by_phi) out.push_back(c);
    return out;
  }

  // Eigenvalues with multiplicity, descending.
  std::vector<Real> eigenvalues() const {
    std::vector<Real> out;
    for (const auto& e : entries) out.insert(out.end(), e.multiplicity, e.lambda);
    std::stable_sort(out.begin(), out.end(), [](const Real& a, const Real& b) { return a > b; });
    return out;
  }
};

// Odd square-free k up to 2^(m/2) * 2 stay comfortably above k_m ~ 2^(m/2) / sqrt(2 alpha).
inline std::uint64_t model_table_limit(unsigned m) {
  return static_cast<std::uint64_t>(std::ceil(2.0 * std::exp2(m / 2.0))) + 64;
}

// How k_m and phi_m are fixed.
//  exact_sums: k_m is the largest odd square-free k with A(k) <= 2^(m-1); the
//    k_m multiplicity is padded so degeneracies sum to 2^(m-1); phi_m is the
//    padded A/B ratio, so the model trace is exactly 1.
//  asymptotic: k_m = floor(2^(m/2) / sqrt(2 alpha)) and
//    phi_m = 2^(m+1) / (m ln 2 + delta), multiplicities phi(k) unpadded.
//    This is the variant that reproduces the published entropy fit.
enum class model_rule { exact_sums, asymptotic };

template <class Real>
struct ModelOptions {
  model_rule rule = model_rule::exact_sums;
  Real alpha = 0, delta = 0;  // required by the asymptotic rule
  bool exact_lN = false;      // Li2(N)/Li(N) instead of 1/(n ln 2)

  static ModelOptions asymptotic(const AppendixConstants<Real>& c) {
    ModelOptions o;
    o.rule = model_rule::asymptotic;
    o.alpha = c.alpha;
    o.delta = c.delta;
    return o;
  }
};

// Eigenvalues gamma_k = 2^m mu^2(k) (1/phi^2(k) - 1/phi_m) of C_m and
// lambda_k = 2^(1-m) (1 + l gamma_k).
template <class Real>
ModelSpectrum<Real> analytic_spectrum(unsigned n, unsigned m, const ArithmeticTable& at,
                                      const ModelOptions<Real>& opt = {}) {
  using std::floor;
  using std::sqrt;
  if (m < 4) throw domain_error("analytic_spectrum needs m >= 4");
  if (m > 62) throw capacity_error("analytic_spectrum needs m <= 62");
  const std::uint64_t dim = std::uint64_t{1} << (m - 1);
  const bool asym = opt.rule == model_rule::asymptotic;
  if (asym && !(opt.alpha > 0)) throw domain_error("asymptotic model rule needs alpha and delta");

  ModelSpectrum<Real> ms;
  ms.n = n;
  ms.m = m;
  std::uint64_t k_bound = 0;
  if (asym)
    k_bound = static_cast<std::uint64_t>(to_double(floor(sqrt(exp2i<Real>(static_cast<int>(m)) / (2 * opt.alpha)))));
  std::uint64_t total = 0;
  for (std::uint64_t k = 1;; k += 2) {
    if (asym && k > k_bound) break;
    if (k > at.limit()) throw capacity_error("arithmetic table too small for k_m");
    if (at.mu(k) == 0) continue;
    const std::uint64_t ph = at.phi(k);
    if (!asym && total + ph > dim) break;
    total += ph;
    ModelEntry<Real> e;
    e.k = k;
    e.phi = ph;
    e.multiplicity = ph;
    ms.entries.push_back(e);
  }
  if (ms.entries.empty()) throw domain_error("model spectrum is empty");
  ms.k_m = ms.entries.back().k;

  if (asym) {
    ms.phi_m = exp2i<Real>(static_cast<int>(m) + 1) / (from_int<Real>(m) * ln2_v<Real>() + opt.delta);
  } else {
    ms.padding = dim - total;
    ms.entries.back().multiplicity += ms.padding;
    // Vanishing trace of C_m: phi_m = sum mult / sum (mult / phi^2).
    compensated_sum<Real> b;
    for (const auto& e : ms.entries) {
      const Real ph = from_int<Real>(static_cast<std::int64_t>(e.phi));
      b += from_int<Real>(static_cast<std::int64_t>(e.multiplicity)) / (ph * ph);
    }
    ms.phi_m = from_int<Real>(static_cast<std::int64_t>(dim)) / b.value();
  }

  const Real two_m = exp2i<Real>(static_cast<int>(m));
  const Real l = ell_N<Real>(n, opt.exact_lN);
  const Real inv_d = Real(1) / from_int<Real>(static_cast<std::int64_t>(dim));
  for (auto& e : ms.entries) {
    const Real ph = from_int<Real>(static_cast<std::int64_t>(e.phi));
    e.gamma = two_m * (Real(1) / (ph * ph) - Real(1) / ms.phi_m);
    e.lambda = inv_d * (1 + l * e.gamma);
  }
  return ms;
}

template <class Real>
ModelSpectrum<Real> analytic_spectrum(unsigned n, unsigned m, const ModelOptions<Real>& opt = {}) {
  return analytic_spectrum<Real>(n, m, ArithmeticTable(model_table_limit(m)), opt);
}

template <class Real>
Real model_entropy(const ModelSpectrum<Real>& ms) {
  compensated_sum<Real> s;
  for (const auto& e : ms.entries)
    if (e.lambda > 0) s += -from_int<Real>(static_cast<std::int64_t>(e.multiplicity)) * e.lambda * log2_of(e.lambda);
  return s.value();
}

// S(n) of the analytic model at m = n/2.
template <class Real>
Real model_entropy(unsigned n, const ArithmeticTable& at, const ModelOptions<Real>& opt = {}) {
  if (n < 8 || n % 2 != 0) throw domain_error("model_entropy needs even n >= 8");
  return model_entropy(analytic_spectrum<Real>(n, n / 2, at, opt));
}

template <class Real>
Real model_entropy(unsigned n, const ModelOptions<Real>& opt = {}) {
  return model_entropy<Real>(n, ArithmeticTable(model_table_limit(n / 2)), opt);
}

// ---------------------------------------------------------------------------
// Trace powers

// Tr C^s for s = 1..smax from the spectrum of C.
template <class Real>
std::vector<Real> trace_powers(const dense_matrix<Real>& C, int smax) {
  using std::pow;
  if (smax < 1) throw domain_error("trace power order must be >= 1");
  const auto eig = symmetric_eigen(C).eigenvalues;
  std::vector<Real> out;
  for (int s = 1; s <= smax; ++s) {
    compensated_sum<Real> t;
    for (const auto& g : eig) t += pow(g, s);
    out.push_back(t.value());
  }
  return out;
}

template <class Real>
Real trace_power(const DensityMatrix<Real>& C, int s) {
  return trace_powers(C.entries, s).back();
}

// 2^(m s) prod_{2 < p <= cutoff} (1 + 1/(p - 1)^(2s - 1)).
template <class Real>
Real trace_power_asymptotic(unsigned m, int s, const PrimeTable& primes) {
  using std::pow;
  if (s == 1) throw domain_error("the asymptotic trace product diverges for s = 1");
  if (s < 2) throw domain_error("trace power order must be >= 2");
  Real prod = 1;
  for (auto p : primes.primes())
    if (p > 2) prod *= 1 + Real(1) / pow(from_int<Real>(static_cast<std::int64_t>(p - 1)), 2 * s - 1);
  return exp2i<Real>(static_cast<int>(m) * s) * prod;
}

template <class Real>
Real trace_power_asymptotic(unsigned m, int s, std::uint64_t cutoff = 1'000'000) {
  if (s == 1) throw domain_error("the asymptotic trace product diverges for s = 1");
  return trace_power_asymptotic<Real>(m, s, sieve_primes(cutoff));
}

// ---------------------------------------------------------------------------
// Entropy series and estimators

template <class Real>
struct EntropySeries {
  std::string family;
  unsigned q = 2;
  std::map<std::pair<unsigned, unsigned>, Real> samples;  // (n, m) -> S in bits

  void add(unsigned n, unsigned m, const Real& S) {
    if (S < Real(-1e-12)) throw domain_error("entropy must be non-negative");
    samples[{n, m}] = S;
  }
  bool has(unsigned n, unsigned m) const { return samples.count({n, m}) != 0; }
  const Real& at(unsigned n, unsigned m) const {
    auto it = samples.find({n, m});
    if (it == samples.end())
      throw domain_error("missing entropy sample n=" + std::to_string(n) + " m=" + std::to_string(m));
    return it->second;
  }
};

template <class Real>
struct Estimators {
  Real slope;      // c_pi(n) = S(n) - S(n-2)
  Real intercept;  // gamma(n) = c_pi(n) n/2 - S(n)
};

// Consecutive-difference estimators at the half cut floor(n/2).
template <class Real>
Estimators<Real> slope_intercept(const EntropySeries<Real>& series, unsigned n) {
  if (n < 3) throw domain_error("slope_intercept needs n >= 3");
  const Real Sn = series.at(n, n / 2);
  const Real Sp = series.at(n - 2, (n - 2) / 2);
  Estimators<Real> e;
  e.slope = Sn - Sp;
  e.intercept = e.slope * from_int<Real>(n / 2) - Sn;
  return e;
}

template <class Real>
struct LinearFit {
  Real slope, intercept;
};

// Ordinary least squares y = slope x + intercept.
template <class Real>
LinearFit<Real> least_squares_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.size() < 2) throw underdetermined_error("line fit needs at least two points");
  const Real n = from_int<Real>(static_cast<std::int64_t>(x.size()));
  compensated_sum<Real> sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const Real mx = sx.value() / n, my = sy.value() / n;
  compensated_sum<Real> sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx.value() == 0) throw underdetermined_error("line fit needs distinct abscissae");
  LinearFit<Real> f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  return f;
}

// ---------------------------------------------------------------------------
// Conjectured constants

// k-th odd square-free number, 1-based: 1, 3, 5, 7, 11, 13, 15, ...
inline std::uint64_t odd_squarefree(unsigned k) {
  if (k < 1) throw domain_error("odd_squarefree index must be >= 1");
  unsigned seen = 0;
  for (std::uint64_t x = 1;; x += 2)
    if (mobius(x) != 0 && ++seen == k) return x;
}

template <class Real>
struct ConjectureConstants {
  Real density;            // 3 / pi^2
  Real slope;              // H(3 / pi^2)
  Real intercept;          // 1 + 3 / pi^2
  std::vector<std::pair<std::uint64_t, Real>> gamma_alpha;  // (alpha = 2^k, 1 + s_k 3 / pi^2)
};

template <class Real>
ConjectureConstants<Real> conjecture_constants(unsigned max_log_alpha = 5) {
  ConjectureConstants<Real> c;
  const Real pi = pi_v<Real>();
  c.density = Real(3) / (pi * pi);
  c.slope = binary_entropy(c.density);
  c.intercept = 1 + c.density;
  for (unsigned k = 1; k <= max_log_alpha; ++k)
    c.gamma_alpha.emplace_back(std::uint64_t{1} << k,
                               1 + from_int<Real>(static_cast<std::int64_t>(odd_squarefree(k))) * c.density);
  return c;
}

// ---------------------------------------------------------------------------
// Fourier fit of S(m, n) / S(floor(n/2), n) against x = m / n

struct FourierFit {
  int K = 0;
  std::vector<double> a, b;  // a[0] = 0 since sin 0 = 0
  std::size_t samples = 0;
  double rms_residual = 0;

  double operator()(double x) const {
    const double two_pi = 2 * std::acos(-1.0);
    double y = 0;
    for (int k = 0; k < K; ++k) y += a[k] * std::sin(two_pi * k * x) + b[k] * std::cos(two_pi * k * x);
    return y;
  }
};

struct FourierSample {
  unsigned n = 0, m = 0;
  double ratio = 0;  // S(m, n) / S(floor(n/2), n)
};

template <class Real>
std::vector<FourierSample> normalized_samples(const EntropySeries<Real>& series) {
  std::vector<FourierSample> out;
  for (const auto& [key, S] : series.samples) {
    const auto [n, m] = key;
    if (!series.has(n, n / 2)) continue;
    const double half = to_double(series.at(n, n / 2));
    if (half <= 0) continue;
    out.push_back({n, m, to_double(S) / half});
  }
  return out;
}

// Unweighted least squares for b_0 and (a_k, b_k), k = 1..K-1.
inline FourierFit fourier_fit(const std::vector<FourierSample>& samples, int K = 8) {
  if (K < 1) throw domain_error("Fourier order must be >= 1");
  if (samples.size() < static_cast<std::size_t>(2 * K + 1))
    throw underdetermined_error("Fourier fit needs at least 2K + 1 samples");
  const double two_pi = 2 * std::acos(-1.0);
  const Eigen::Index cols = 2 * K - 1;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(samples.size()), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = static_cast<double>(samples[i].m) / samples[i].n;
    const auto r = static_cast<Eigen::Index>(i);
    A(r, 0) = 1;
    for (int k = 1; k < K; ++k) {
      A(r, 2 * k - 1) = std::sin(two_pi * k * x);
      A(r, 2 * k) = std::cos(two_pi * k * x);
    }
    y(r) = samples[i].ratio;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < cols) throw underdetermined_error("Fourier design matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(y);

  FourierFit f;
  f.K = K;
  f.samples = samples.size();
  f.a.assign(K, 0.0);
  f.b.assign(K, 0.0);
  f.b[0] = c(0);
  for (int k = 1; k < K; ++k) {
    f.a[k] = c(2 * k - 1);
    f.b[k] = c(2 * k);
  }
  f.rms_residual = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(samples.size()));
  return f;
}

template <class Real>
FourierFit fourier_fit(const EntropySeries<Real>& series, int K = 8) {
  return fourier_fit(normalized_samples(series), K);
}

// ---------------------------------------------------------------------------
// CSV persistence: family,q,n,m,entropy_bits,prec_bits

struct EntropyRow {
  std::string family;
  unsigned q = 2, n = 0, m = 0;
  std::string entropy_bits;  // full-precision decimal
  int prec_bits = 0;

  auto key() const { return std::tie(family, q, n, m, prec_bits); }
};

inline const char* entropy_csv_header = "family,q,n,m,entropy_bits,prec_bits";

inline std::vector<EntropyRow> read_entropy_csv(const std::filesystem::path& path) {
  std::vector<EntropyRow> rows;
  std::ifstream is(path);
  if (!is) return rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == entropy_csv_header) continue;
    std::stringstream ss(line);
    std::string f[6];
    for (auto& x : f)
      if (!std::getline(ss, x, ',')) throw domain_error("malformed entropy CSV row: " + line);
    EntropyRow r;
    r.family = f[0];
    r.q = static_cast<unsigned>(std::stoul(f[1]));
    r.n = static_cast<unsigned>(std::stoul(f[2]));
    r.m = static_cast<unsigned>(std::stoul(f[3]));
    r.entropy_bits = f[4];
    r.prec_bits = std::stoi(f[5]);
    rows.push_back(r);
  }
  return rows;
}

// Adds rows whose (family, q, n, m, prec) key is not yet present and
// rewrites the file atomically. Returns the number of rows added.
inline std::size_t append_entropy_csv(const std::filesystem::path& path, const std::vector<EntropyRow>& fresh) {
  auto rows = read_entropy_csv(path);
  std::size_t added = 0;
  for (const auto& r : fresh) {
    const bool dup = std::any_of(rows.begin(), rows.end(), [&](const EntropyRow& x) { return x.key() == r.key(); });
    if (!dup) {
      rows.push_back(r);
      ++added;
    }
  }
  if (added == 0 && std::filesystem::exists(path)) return 0;
  detail::write_atomically(
      path,
      [&](std::ostream& os) {
        os << entropy_csv_header << '\n';
        for (const auto& r : rows)
          os << r.family << ',' << r.q << ',' << r.n << ',' << r.m << ',' << r.entropy_bits << ',' << r.prec_bits
             << '\n';
      },
      std::ios::out);
  return added;
}

}  // namespace ntqs
