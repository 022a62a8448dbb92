#include <gtest/gtest.h>

#include <complex>

#include "ntqs/spectral.hpp"

using namespace ntqs;

namespace {

// Unreduced phases in 256-bit arithmetic.
mpfr_real oracle_probability(const NumberState& st, mpfr_real k) {
  mpfr_real re = 0, im = 0;
  const mpfr_real N = static_cast<double>(st.dimension());
  const mpfr_real two_pi = 2 * boost::math::constants::pi<mpfr_real>();
  for (std::size_t i = 0; i < st.size(); ++i) {
    mpfr_real ph = two_pi * mpfr_real(static_cast<double>(st.values()[i])) * k / N;
    re += st.signs()[i] * cos(ph);
    im += st.signs()[i] * sin(ph);
  }
  return (re * re + im * im) / (N * st.size());
}

}  // namespace

TEST(Qft, SmallExamples) {
  auto p4 = build_prime_state(4);
  EXPECT_DOUBLE_EQ(qft_probability<double>(p4, 0), 0.375);
  EXPECT_NEAR(qft_probability<double>(p4, 8), 1.0 / 6, 1e-15);
  EXPECT_NEAR(static_cast<double>(qft_probability<quad>(p4, Frequency{16, 4, {}})), 1.0 / 48, 1e-15);
  for (std::uint64_t k = 0; k < 16; ++k)
    EXPECT_NEAR(qft_probability<double>(p4, k), qft_probability<double>(p4, 16 - k), 1e-15);
}

TEST(Qft, MatchesHighPrecisionOracle) {
  mpfr_precision_scope scope(256);
  for (unsigned n : {5u, 9u, 12u}) {
    auto st = build_mobius_state(n);
    const std::uint64_t N = st.dimension();
    for (std::uint64_t den : {1u, 3u, 6u, 7u}) {
      for (std::uint64_t num : {N / 5, N, 3 * N + 1}) {
        quad got = qft_probability<quad>(st, Frequency{num, den, {}});
        mpfr_real want = oracle_probability(st, mpfr_real(static_cast<double>(num)) / den);
        EXPECT_LT(abs(mpfr_real(got) - want), 1e-30) << n << " " << num << "/" << den;
      }
    }
  }
}

TEST(Qft, PhaseReductionHandlesLargeValues) {
  // Values near 2^30 where a naive double phase would lose ~9 digits.
  std::vector<std::uint64_t> vals{(1u << 30) - 35, (1u << 30) - 3, (1u << 30) - 1};
  NumberState st(2, 30, {family::uniform}, vals, {1, 1, 1});
  mpfr_precision_scope scope(256);
  quad got = qft_probability<quad>(st, Frequency{(1u << 30) / 3 + 1, 1, {}});
  mpfr_real want = oracle_probability(st, mpfr_real((1u << 30) / 3 + 1));
  EXPECT_LT(abs(mpfr_real(got) - want), 1e-32);
}

TEST(Qft, FullSpectrum) {
  auto u = build_uniform_state(6);
  auto P = full_qft_spectrum<double>(u);
  EXPECT_NEAR(P[0], 1.0, 1e-15);
  for (std::size_t k = 1; k < P.size(); ++k) EXPECT_NEAR(P[k], 0.0, 1e-15);

  NumberState single(2, 5, {family::uniform}, {7}, {1});
  for (double p : full_qft_spectrum<double>(single)) EXPECT_NEAR(p, 1.0 / 32, 1e-16);

  for (unsigned n : {4u, 10u, 16u}) {
    auto st = build_prime_state(n);
    auto S = full_qft_spectrum<quad>(st);
    compensated_sum<quad> total;
    for (const auto& p : S) total += p;
    EXPECT_LT(abs(total.value() - 1), quad(S.size()) * exp2i<quad>(20 - 113));
    const std::uint64_t N = S.size();
    for (std::uint64_t k = 1; k < N; ++k) ASSERT_LT(abs(S[k] - S[N - k]), exp2i<quad>(30 - 113));
    for (std::uint64_t k = 0; k < N; k += N / 16 + 1)
      EXPECT_LT(abs(S[k] - qft_probability<quad>(st, k)), 1e-30) << k;
  }
  // Base-3 register goes through the direct path.
  auto t = build_prime_state(5, 3);
  auto S3 = full_qft_spectrum<double>(t);
  for (std::uint64_t k = 0; k < S3.size(); ++k) EXPECT_NEAR(S3[k], qft_probability<double>(t, k), 1e-14);
  EXPECT_THROW(full_qft_spectrum<double>(build_prime_state(21)), capacity_error);
}

TEST(Peaks, ClosedFormMatchesDirect) {
  auto table = sieve_primes(1 << 16);
  for (unsigned n = 4; n <= 16; ++n) {
    auto r = closed_form_peaks<quad>(n, table);
    for (const auto* pv : {&r.P0, &r.PN2, &r.PN3, &r.PN4, &r.PN6})
      EXPECT_LT(abs(pv->formula - pv->direct) / pv->direct, 1e-20) << n;
  }
  auto r4 = closed_form_peaks<quad>(4, table);
  EXPECT_EQ(r4.delta, 1);
  EXPECT_NEAR(static_cast<double>(r4.PN4.formula), 1.0 / 48, 1e-18);
  EXPECT_NEAR(static_cast<double>(r4.PN2.formula), 1.0 / 6, 1e-18);
}

TEST(Peaks, AlternativeSixthVariantDisagrees) {
  auto table = sieve_primes(1 << 12);
  int differ = 0;
  for (unsigned n = 4; n <= 12; ++n) {
    auto r = closed_form_peaks<quad>(n, table);
    if (r.pi61 != r.pi65) {
      EXPECT_GT(abs(r.PN6_alternative - r.PN6.direct) / r.PN6.direct, 1e-6) << n;
      ++differ;
    }
  }
  EXPECT_GT(differ, 0);
}

TEST(Peaks, BiasExtractionRoundTrip) {
  auto table = sieve_primes(1 << 20);
  for (unsigned n = 4; n <= 20; ++n) {
    auto r = closed_form_peaks<quad>(n, table);
    auto [u, v] = extract_biases(r.PN3.direct, r.PN6.direct, r.pi, r.N);
    EXPECT_EQ(u, pi_mod(6, 1, r.N - 1, table)) << n;
    EXPECT_EQ(v, pi_mod(6, 5, r.N - 1, table)) << n;
    EXPECT_EQ(chebyshev_from_peak(r.PN4.direct, r.pi, r.N),
              static_cast<std::uint64_t>(std::llabs(chebyshev_bias(r.N - 1, table))))
        << n;
  }
  // n = 3: primes 2, 3, 5, 7.
  auto r3 = closed_form_peaks<double>(3, table);
  EXPECT_EQ(extract_biases(r3.PN3.formula, r3.PN6.formula, 4, 8), (std::pair<std::uint64_t, std::uint64_t>{1, 1}));
}

TEST(Peaks, ExtractionRejectsInconsistentInput) {
  auto table = sieve_primes(1 << 12);
  auto r = closed_form_peaks<double>(12, table);
  const double bump = 0.5 / (static_cast<double>(r.N) * r.pi);
  EXPECT_THROW(extract_biases(r.PN3.direct + bump, r.PN6.direct, r.pi, r.N), extraction_error);
  EXPECT_THROW(extract_biases(1.5, 0.1, r.pi, r.N), domain_error);
}

TEST(Peaks, ChebyshevFromPeak) {
  EXPECT_EQ(chebyshev_from_peak(1.0 / 48, 6, 16), 1u);
  EXPECT_EQ(chebyshev_from_peak(1.0 / (16 * 6), 6, 16), 0u);
  auto table = sieve_primes(256);
  auto r = closed_form_peaks<double>(8, table);
  EXPECT_EQ(chebyshev_from_peak(r.PN4.direct, r.pi, r.N), static_cast<std::uint64_t>(std::llabs(chebyshev_bias(255, table))));
  EXPECT_THROW(chebyshev_from_peak(0.0, 6, 16), domain_error);
}

TEST(Ancilla, TruncationErrors) {
  auto st = build_prime_state(15);
  auto a = ancilla_peak<quad>(st, 3, 9);
  EXPECT_LT(a.relative_error, 1e-3);
  EXPECT_EQ(ancilla_peak<quad>(st, 2, 3).relative_error, 0);
  double prev = 1e9;
  for (int t : {4, 8, 12, 16, 20}) {
    double mean = 0;
    for (unsigned n : {10u, 12u, 14u}) mean += static_cast<double>(ancilla_peak<quad>(build_prime_state(n), 6, t).relative_error);
    EXPECT_LT(mean, prev) << t;
    prev = mean;
  }
  auto p12 = build_prime_state(12);
  EXPECT_LT(ancilla_peak<quad>(p12, 3, 9).relative_error, 1e-3);
}

TEST(Counting, TermsViaQft) {
  EXPECT_EQ(count_terms_via_qft(build_prime_state(5)), 11u);
  EXPECT_EQ(count_terms_via_qft(build_uniform_state(5)), 32u);
  EXPECT_EQ(count_terms_via_qft(build_squarefree_state(4)), 7u);
  EXPECT_THROW(count_terms_via_qft(build_mobius_state(4)), domain_error);
  for (unsigned n = 4; n <= 16; ++n) {
    EXPECT_EQ(count_terms_via_qft(build_odd_composite_state(n)), build_odd_composite_state(n).size());
    EXPECT_EQ(count_terms_via_qft(build_starry_state(n, 3)), build_starry_state(n, 3).size());
  }
}

TEST(Shots, StandardErrorShrinks) {
  auto P = full_qft_spectrum<double>(build_prime_state(8));
  auto a = sample_shots(P, 1000, 1);
  auto b = sample_shots(P, 100000, 1);
  EXPECT_NEAR(a.frequency[0], P[0], 5 * std::sqrt(P[0] * (1 - P[0]) / 1000));
  EXPECT_NEAR(b.frequency[0], P[0], 5 * std::sqrt(P[0] * (1 - P[0]) / 100000));
  EXPECT_LT(b.standard_error[0], a.standard_error[0]);
  double sum = 0;
  for (double f : b.frequency) sum += f;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}
