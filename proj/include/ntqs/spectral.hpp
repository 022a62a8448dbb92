// spectral.hpp
// Quantum Fourier transform probabilities of number-theoretical states,
// evaluated as exact-phase exponential sums, together with the closed-form
// peak expressions and their inversion to modular prime counts.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "ntqs/errors.hpp"
#include "ntqs/numtheory.hpp"
#include "ntqs/real.hpp"
#include "ntqs/states.hpp"

namespace ntqs {

// Frequency k = numerator / denominator, in the units where the QFT phase of
// basis state v is 2 pi v k / N. With ancilla_bits = t the frequency is first
// truncated to t binary fraction digits.
struct Frequency {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  std::optional<int> ancilla_bits;

  // The evaluated frequency as an exact fraction.
  std::pair<std::uint64_t, std::uint64_t> effective() const {
    if (denominator == 0) throw domain_error("frequency denominator must be >= 1");
    if (!ancilla_bits) return {numerator, denominator};
    const int t = *ancilla_bits;
    if (t < 1 || t > 40) throw domain_error("ancilla bits must lie in [1, 40]");
    const auto scaled = (static_cast<unsigned __int128>(numerator) << t) / denominator;
    if (scaled >> 63) throw capacity_error("truncated frequency does not fit in 63 bits");
    return {static_cast<std::uint64_t>(scaled), std::uint64_t{1} << t};
  }
};

namespace detail {

// sum_v sign(v) e^{2 pi i v num / (den N)}. Phases are reduced modulo den*N in
// integers; equal residues are merged before any trigonometry.
template <class Real>
std::pair<Real, Real> qft_amplitude_sum(const NumberState& st, std::uint64_t num, std::uint64_t den) {
  using std::cos;
  using std::sin;
  const auto N = st.dimension();
  const unsigned __int128 modulus = static_cast<unsigned __int128>(den) * N;
  if (modulus >> 63) throw capacity_error("phase modulus den*N exceeds 2^63");
  const auto M = static_cast<std::uint64_t>(modulus);
  const auto k = num % M;

  std::vector<std::pair<std::uint64_t, std::int64_t>> res;
  res.reserve(st.size());
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(st.values()[i]) * k) % M);
    res.emplace_back(r, st.signs()[i]);
  }
  std::sort(res.begin(), res.end());

  const Real two_pi_over_m = 2 * pi_v<Real>() / from_int<Real>(static_cast<std::int64_t>(M));
  compensated_sum<Real> re, im;
  for (std::size_t i = 0; i < res.size();) {
    std::int64_t count = 0;
    std::size_t j = i;
    for (; j < res.size() && res[j].first == res[i].first; ++j) count += res[j].second;
    if (count != 0) {
      const Real c = from_int<Real>(count);
      if (res[i].first == 0) {
        re += c;
      } else {
        const Real phase = two_pi_over_m * from_int<Real>(static_cast<std::int64_t>(res[i].first));
        re += c * cos(phase);
        im += c * sin(phase);
      }
    }
    i = j;
  }
  return {re.value(), im.value()};
}

}  // namespace detail

// |sum_v sign(v) e^{2 pi i v k / N}|^2 / (N |support|)
template <class Real>
Real qft_probability(const NumberState& st, const Frequency& f) {
  const auto [num, den] = f.effective();
  const auto [re, im] = detail::qft_amplitude_sum<Real>(st, num, den);
  const Real norm = from_int<Real>(static_cast<std::int64_t>(st.dimension())) *
                    from_int<Real>(static_cast<std::int64_t>(st.size()));
  return (re * re + im * im) / norm;
}

template <class Real>
Real qft_probability(const NumberState& st, std::uint64_t k) {
  return qft_probability<Real>(st, Frequency{k, 1, std::nullopt});
}

inline constexpr std::uint64_t max_full_spectrum = std::uint64_t{1} << 20;

namespace detail {

// In-place iterative radix-2 transform, X_k = sum_v x_v e^{+2 pi i v k / N}.
template <class Real>
void fft_radix2(std::vector<Real>& re, std::vector<Real>& im) {
  using std::cos;
  using std::sin;
  const std::size_t N = re.size();
  for (std::size_t i = 1, j = 0; i < N; ++i) {
    std::size_t bit = N >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  // Twiddles from direct evaluation, not recurrences, to keep full accuracy.
  std::vector<Real> wr(N / 2), wi(N / 2);
  const Real base = 2 * pi_v<Real>() / from_int<Real>(static_cast<std::int64_t>(N));
  for (std::size_t j = 0; j < N / 2; ++j) {
    wr[j] = cos(base * from_int<Real>(static_cast<std::int64_t>(j)));
    wi[j] = sin(base * from_int<Real>(static_cast<std::int64_t>(j)));
  }
  for (std::size_t len = 2; len <= N; len <<= 1) {
    const std::size_t half = len / 2, stride = N / len;
    for (std::size_t s = 0; s < N; s += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Real& c = wr[j * stride];
        const Real& d = wi[j * stride];
        const std::size_t a = s + j, b = a + half;
        const Real tr = re[b] * c - im[b] * d;
        const Real ti = re[b] * d + im[b] * c;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }
}

}  // namespace detail

// P(k) for k = 0..N-1. Power-of-two registers use an FFT, others a direct
// sum over an exact cosine table.
template <class Real>
std::vector<Real> full_qft_spectrum(const NumberState& st) {
  using std::cos;
  using std::sin;
  const auto N = st.dimension();
  if (N > max_full_spectrum) throw capacity_error("full spectrum limited to N <= 2^20");
  const Real norm = from_int<Real>(static_cast<std::int64_t>(N)) * from_int<Real>(static_cast<std::int64_t>(st.size()));
  std::vector<Real> P(N);
  if ((N & (N - 1)) == 0) {
    std::vector<Real> re(N, Real(0)), im(N, Real(0));
    for (std::size_t i = 0; i < st.size(); ++i)
      if (st.values()[i] < N) re[st.values()[i]] = from_int<Real>(st.signs()[i]);
      else throw domain_error("support value outside the register");
    detail::fft_radix2(re, im);
    for (std::uint64_t k = 0; k < N; ++k) P[k] = (re[k] * re[k] + im[k] * im[k]) / norm;
    return P;
  }
  if (static_cast<double>(N) * static_cast<double>(st.size()) > 0x1p36)
    throw capacity_error("direct spectrum too large for a non power-of-two register");
  std::vector<Real> cr(N), ci(N);
  const Real base = 2 * pi_v<Real>() / from_int<Real>(static_cast<std::int64_t>(N));
  for (std::uint64_t j = 0; j < N; ++j) {
    cr[j] = cos(base * from_int<Real>(static_cast<std::int64_t>(j)));
    ci[j] = sin(base * from_int<Real>(static_cast<std::int64_t>(j)));
  }
  for (std::uint64_t k = 0; k < N; ++k) {
    compensated_sum<Real> re, im;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const auto r = (st.values()[i] % N) * k % N;
      const Real s = from_int<Real>(st.signs()[i]);
      re += s * cr[r];
      im += s * ci[r];
    }
    const Real a = re.value(), b = im.value();
    P[k] = (a * a + b * b) / norm;
  }
  return P;
}

// ---------------------------------------------------------------------------
// Closed-form peaks of the qubit Prime state

template <class Real>
struct PeakValue {
  Real formula;
  Real direct;
};

template <class Real>
struct PeakReport {
  unsigned n = 0;
  std::uint64_t N = 0;
  std::uint64_t pi = 0;  // pi(N)
  PeakValue<Real> P0, PN2, PN3, PN4, PN6;
  // P(N/6) with the variant that ends in -3 pi_{6,1} + 3, kept for comparison.
  Real PN6_alternative;

  // Modular counts behind the formulas.
  std::uint64_t pi61 = 0, pi65 = 0, pi31 = 0, pi32 = 0, pi41 = 0, pi43 = 0;
  std::int64_t delta = 0;   // pi_{4,3} - pi_{4,1}
  std::int64_t delta3 = 0;  // pi_{3,2} - pi_{3,1}
  std::int64_t delta6 = 0;  // pi_{6,5} - pi_{6,1}
};

// P(0), P(N/2), P(N/3), P(N/4), P(N/6) for the n-qubit Prime state from
// modular prime counts, alongside the direct exponential sums.
template <class Real>
PeakReport<Real> closed_form_peaks(unsigned n, const PrimeTable& table) {
  if (n < 3) throw domain_error("closed-form peaks need n >= 3");
  const auto N = register_size(2, n);
  detail::require_table(table, N - 1);
  PeakReport<Real> r;
  r.n = n;
  r.N = N;
  r.pi = table.pi(N - 1);
  r.pi61 = pi_mod(6, 1, N - 1, table);
  r.pi65 = pi_mod(6, 5, N - 1, table);
  r.pi31 = pi_mod(3, 1, N - 1, table);
  r.pi32 = pi_mod(3, 2, N - 1, table);
  r.pi41 = pi_mod(4, 1, N - 1, table);
  r.pi43 = pi_mod(4, 3, N - 1, table);
  r.delta = static_cast<std::int64_t>(r.pi43) - static_cast<std::int64_t>(r.pi41);
  r.delta3 = static_cast<std::int64_t>(r.pi32) - static_cast<std::int64_t>(r.pi31);
  r.delta6 = static_cast<std::int64_t>(r.pi65) - static_cast<std::int64_t>(r.pi61);

  const auto p = static_cast<std::int64_t>(r.pi);
  const auto u = static_cast<std::int64_t>(r.pi61), v = static_cast<std::int64_t>(r.pi65);
  const auto a = static_cast<std::int64_t>(r.pi31), b = static_cast<std::int64_t>(r.pi32);
  const Real Npi = from_int<Real>(static_cast<std::int64_t>(N)) * from_int<Real>(p);
  auto ratio = [&](std::int64_t num) { return from_int<Real>(num) / Npi; };

  r.P0.formula = from_int<Real>(p) / from_int<Real>(static_cast<std::int64_t>(N));
  r.PN2.formula = ratio(p * p - 4 * p + 4);
  r.PN3.formula = ratio(r.delta3 * r.delta3 + a * b - p + 2);
  r.PN4.formula = ratio(1 + r.delta * r.delta);
  r.PN6.formula = ratio(r.delta6 * r.delta6 + u * v - 3 * v + 3);
  r.PN6_alternative = ratio(r.delta6 * r.delta6 + u * v - 3 * u + 3);

  const auto st = build_prime_state(n, 2, table);
  r.P0.direct = qft_probability<Real>(st, Frequency{0, 1, {}});
  r.PN2.direct = qft_probability<Real>(st, Frequency{N, 2, {}});
  r.PN3.direct = qft_probability<Real>(st, Frequency{N, 3, {}});
  r.PN4.direct = qft_probability<Real>(st, Frequency{N, 4, {}});
  r.PN6.direct = qft_probability<Real>(st, Frequency{N, 6, {}});
  return r;
}

// Recovers (pi_{6,1}, pi_{6,5}) from P(N/3) and P(N/6).
//
// With u = pi_{6,1}, v = pi_{6,5}, and pi_{3,1} = u, pi_{3,2} = v + 1:
//   T6 = N pi P(N/6) = u^2 - u v + v^2 - 3 v + 3
//   T3 = N pi P(N/3) = (u - v - 1)^2 + u (v + 1) - pi + 2
// For each u in the search window the T6 quadratic gives candidate v; the
// pair with the smallest combined residual wins.
template <class Real>
std::pair<std::uint64_t, std::uint64_t> extract_biases(const Real& P3, const Real& P6, std::uint64_t piN,
                                                       std::uint64_t N) {
  using std::abs;
  using std::floor;
  using std::sqrt;
  if (piN < 4) throw domain_error("extract_biases needs pi(N) >= 4");
  if (!(P3 >= 0) || !(P6 >= 0) || P3 > 1 || P6 > 1) throw domain_error("peak values outside [0, 1]");
  const Real Npi = from_int<Real>(static_cast<std::int64_t>(N)) * from_int<Real>(static_cast<std::int64_t>(piN));
  const Real T3 = P3 * Npi, T6 = P6 * Npi;
  const auto p = static_cast<std::int64_t>(piN);

  const double half_width = 4 * std::sqrt(static_cast<double>(N)) * std::log(static_cast<double>(N));
  const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(p / 2.0 - half_width)));
  const auto hi = std::min<std::int64_t>(p, static_cast<std::int64_t>(std::ceil(p / 2.0 + half_width)));

  auto t3 = [&](std::int64_t u, std::int64_t v) { return (u - v - 1) * (u - v - 1) + u * (v + 1) - p + 2; };
  auto t6 = [&](std::int64_t u, std::int64_t v) { return u * u - u * v + v * v - 3 * v + 3; };

  struct candidate {
    std::int64_t u, v;
    Real residual;
  };
  std::optional<candidate> best;
  for (std::int64_t u = lo; u <= hi; ++u) {
    // v^2 - (u + 3) v + (u^2 + 3 - T6) = 0
    const Real B = from_int<Real>(u + 3);
    const Real disc = B * B - 4 * (from_int<Real>(u * u + 3) - T6);
    if (disc < -1) continue;
    const Real root = sqrt(disc < 0 ? Real(0) : disc);
    for (const Real& vr : {(B - root) / 2, (B + root) / 2}) {
      const auto vc = static_cast<std::int64_t>(to_double(floor(vr + Real(0.5))));
      for (std::int64_t v = vc - 1; v <= vc + 1; ++v) {
        if (v < 0 || u + v > p) continue;
        const Real res = abs(from_int<Real>(t3(u, v)) - T3) + abs(from_int<Real>(t6(u, v)) - T6);
        const bool better = !best || res < best->residual ||
                            (res == best->residual && u + v == p - 2 && best->u + best->v != p - 2);
        if (better) best = candidate{u, v, res};
      }
    }
  }
  if (!best || best->residual > Real(0.25))
    throw extraction_error("no integer (pi_{6,1}, pi_{6,5}) consistent with the peak values");
  return {static_cast<std::uint64_t>(best->u), static_cast<std::uint64_t>(best->v)};
}

// |Delta(N)| = sqrt(N pi P(N/4) - 1). The sign of the bias cannot be read
// off P(N/4).
template <class Real>
std::uint64_t chebyshev_from_peak(const Real& P4, std::uint64_t piN, std::uint64_t N) {
  using std::sqrt;
  const Real r = P4 * from_int<Real>(static_cast<std::int64_t>(N)) * from_int<Real>(static_cast<std::int64_t>(piN)) - 1;
  if (r < Real(-0.25)) throw domain_error("P(N/4) below the zero-bias floor 1/(N pi)");
  const Real root = sqrt(r < 0 ? Real(0) : r);
  return static_cast<std::uint64_t>(to_double(root) + 0.5);
}

template <class Real>
struct AncillaPeak {
  Real value;           // probability at the truncated frequency
  Real exact;           // probability at N/denom
  Real relative_error;  // |value - exact| / exact
};

// P at the t-bit truncation of N/denom versus the exact frequency.
template <class Real>
AncillaPeak<Real> ancilla_peak(const NumberState& st, std::uint64_t denom, int t) {
  using std::abs;
  if (t < 1) throw domain_error("ancilla bits must be >= 1");
  if (denom < 1) throw domain_error("denominator must be >= 1");
  const auto N = st.dimension();
  AncillaPeak<Real> out;
  out.exact = qft_probability<Real>(st, Frequency{N, denom, std::nullopt});
  out.value = qft_probability<Real>(st, Frequency{N, denom, t});
  out.relative_error = out.exact == 0 ? abs(out.value) : abs(out.value - out.exact) / out.exact;
  return out;
}

// |support| = N P(0) for states with all amplitudes positive.
inline std::uint64_t count_terms_via_qft(const NumberState& st) {
  if (!st.unsigned_support()) throw domain_error("term counting needs a state without negative amplitudes");
  const quad p0 = qft_probability<quad>(st, Frequency{0, 1, std::nullopt});
  const quad scaled = p0 * from_int<quad>(static_cast<std::int64_t>(st.dimension()));
  return static_cast<std::uint64_t>(to_double(scaled) + 0.5);
}

// Multinomial shot noise: M draws from a probability vector, returning the
// observed frequencies and the standard errors sqrt(p (1 - p) / M).
struct ShotEstimate {
  std::vector<double> frequency;
  std::vector<double> standard_error;
};

template <class Real>
ShotEstimate sample_shots(const std::vector<Real>& probabilities, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw domain_error("shot count must be positive");
  std::vector<double> w(probabilities.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(0.0, to_double(probabilities[i]));
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
  std::vector<std::uint64_t> hits(w.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) ++hits[dist(rng)];
  ShotEstimate est;
  est.frequency.resize(w.size());
  est.standard_error.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double f = static_cast<double>(hits[i]) / static_cast<double>(shots);
    est.frequency[i] = f;
    est.standard_error[i] = std::sqrt(f * (1 - f) / static_cast<double>(shots));
  }
  return est;
}

}  // namespace ntqs
