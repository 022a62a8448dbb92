// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,5,12] [--memo file.json]
//
// --memo caches expensive entropies between development runs; the ctest
// registration never passes it, so the recorded run computes everything.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ntqs/analysis.hpp"
#include "ntqs/entangle.hpp"
#include "ntqs/spectral.hpp"
#include "ntqs/states.hpp"

using namespace ntqs;
using json = nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

class Memo {
public:
  explicit Memo(std::string path) : path_(std::move(path)) {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream is(path_);
    data_ = json::parse(is);
  }

  // Decimal-string cache so quad values survive the round trip.
  template <class Real>
  Real get(const std::string& key, const std::function<Real()>& compute) {
    if (!path_.empty() && data_.contains(key)) return from_decimal<Real>(data_[key].get<std::string>());
    const Real v = compute();
    if (!path_.empty()) {
      data_[key] = to_decimal(v);
      std::ofstream(path_) << data_.dump(1);
    }
    return v;
  }

private:
  std::string path_;
  json data_ = json::object();
};

const PrimeTable& primes24() {
  static const PrimeTable t = sieve_primes(std::uint64_t{1} << 24);
  return t;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

// Agreement after rounding both to `sig` significant digits.
bool same_significant(double x, double ref, int sig) {
  const double e = std::floor(std::log10(std::abs(ref)));
  return std::abs(x - ref) <= 0.5 * std::pow(10.0, e - sig + 1);
}

// ---------------------------------------------------------------------------

Verdict peak_formulas() {
  const quad tol("1e-20");
  quad worst = 0;
  int alt_differs = 0;
  for (unsigned n = 4; n <= 16; ++n) {
    const auto r = closed_form_peaks<quad>(n, primes24());
    for (const auto* p : {&r.P0, &r.PN2, &r.PN3, &r.PN4, &r.PN6}) {
      const quad err = p->direct == 0 ? abs(p->formula) : abs(p->formula - p->direct) / abs(p->direct);
      worst = std::max(worst, err);
    }
    if (abs(r.PN6_alternative - r.PN6.direct) > tol * r.PN6.direct) ++alt_differs;
  }
  return {worst <= tol, "max relative error " + fmt(worst.convert_to<double>(), 3) +
                            " over n=4..16; the -3 pi_{6,1} + 3 variant of P(N/6) disagrees at " +
                            std::to_string(alt_differs) + "/13 sizes"};
}

Verdict bias_round_trip() {
  int bad = 0;
  for (unsigned n = 4; n <= 20; ++n) {
    const auto r = closed_form_peaks<quad>(n, primes24());
    const auto x = r.N - 1;
    const auto u_ref = pi_mod(6, 1, x, primes24()), v_ref = pi_mod(6, 5, x, primes24());
    const auto d_ref = std::abs(chebyshev_bias(x, primes24()));
    const auto [u, v] = extract_biases(r.PN3.direct, r.PN6.direct, pi(x, primes24()), r.N);
    const auto d = chebyshev_from_peak(r.PN4.direct, pi(x, primes24()), r.N);
    if (u != u_ref || v != v_ref || static_cast<std::int64_t>(d) != d_ref) ++bad;
  }
  return {bad == 0, std::to_string(17 - bad) + "/17 sizes recover pi_{6,1}, pi_{6,5} and |Delta| exactly"};
}

Verdict ramanujan_structure() {
  std::vector<std::string> fails;
  const std::map<std::uint64_t, std::vector<int>> table15{
      {1, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {3, {0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0}},
      {5, {0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0}},
      {15, {1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0}},
  };
  const auto t = ramanujan_eigen_table(15);
  bool table_ok = t.size() == table15.size();
  for (const auto& [k, row] : t) table_ok = table_ok && table15.count(k) && table15.at(k) == row;
  if (!table_ok) fails.push_back("D=15 table");

  // R_{k,D} = sum of shifted circulants: eigenvalue D - phi(k) with
  // multiplicity phi(k), -phi(k) on the rest.
  for (std::uint64_t D : {15u, 105u})
    for (auto k : divisors(D)) {
      const auto R = ramanujan_matrix(k, D);
      dense_matrix<double> Rd(D);
      for (std::size_t i = 0; i < R.a.size(); ++i) Rd.a[i] = static_cast<double>(R.a[i]);
      const auto eig = symmetric_eigen(Rd).eigenvalues;
      const auto phi = static_cast<double>(totient(k));
      for (std::size_t i = 0; i < D; ++i) {
        const double expect = i < D - totient(k) ? -phi : static_cast<double>(D) - phi;
        if (std::abs(eig[i] - expect) > 1e-9) {
          fails.push_back("R_{" + std::to_string(k) + "," + std::to_string(D) + "}");
          break;
        }
      }
    }

  const double tilde_top = symmetric_eigen(tilde_C<double>(15).entries).eigenvalues.back();
  const double exact_top = symmetric_eigen(hl_matrix_D(15, HLConstants<double>()).entries).eigenvalues.back();
  if (!within(tilde_top, 26.25, 1e-12)) fails.push_back("tilde C top");
  if (!within(exact_top, 25.0742, 5e-4)) fails.push_back("C_15 top");
  std::string detail = "tilde C_15 top " + fmt(tilde_top, 8) + ", C_15 top " + fmt(exact_top, 7);
  for (const auto& f : fails) detail += "; mismatch " + f;
  return {fails.empty(), detail};
}

Verdict constants() {
  const auto ac = appendix_constants<quad>(10'000'000);
  const double a = ac.alpha.convert_to<double>(), b = ac.beta.convert_to<double>(), d = ac.delta.convert_to<double>();
  const bool ok_a = same_significant(a, 0.171299873, 8), ok_b = same_significant(b, 1.679135304, 8),
             ok_d = same_significant(d, 4.42946304048, 8);
  auto part = [](const char* name, double x, double ref, bool ok) {
    return std::string(name) + " " + fmt(x, 10) + " vs " + fmt(ref, 10) + (ok ? "" : " (differs)");
  };
  return {ok_a && ok_b && ok_d, part("alpha", a, 0.171299873, ok_a) + ", " + part("beta", b, 1.679135304, ok_b) +
                                    ", " + part("delta", d, 4.42946304048, ok_d)};
}

EntropySeries<quad> prime_half_chain_quad(Memo& memo, unsigned n_max) {
  EntropySeries<quad> s;
  for (unsigned n = 10; n <= n_max; n += 2)
    s.add(n, n / 2, memo.get<quad>("prime_quad_" + std::to_string(n), [&] {
      return bipartition_entropy<quad>(build_prime_state(n, 2, primes24()), n / 2);
    }));
  return s;
}

Verdict entropy_scaling(Memo& memo) {
  const auto s = prime_half_chain_quad(memo, 24);
  const double H = conjecture_constants<double>().slope;
  const auto e24 = slope_intercept(s, 24), e16 = slope_intercept(s, 16);
  const double c24 = e24.slope.convert_to<double>(), g24 = e24.intercept.convert_to<double>();
  const double d16 = std::abs(e16.slope.convert_to<double>() - H), d24 = std::abs(c24 - H);
  const bool ok = within(c24, 0.886082085, 0.02) && within(g24, 1.30396355, 0.15) && d24 < d16;
  return {ok, "c(24) " + fmt(c24, 7) + ", gamma(24) " + fmt(g24, 7) + ", |c-H| " + fmt(d16, 3) + " at n=16, " +
                  fmt(d24, 3) + " at n=24 (quad)"};
}

Verdict linear_fit_check(Memo& memo) {
  const auto s = prime_half_chain_quad(memo, 20);
  const double S20 = s.at(20, 10).convert_to<double>(), ref = 0.88612902 * 10 - 1.30405956;
  return {within(S20, ref, 0.05), "S(10,20) " + fmt(S20, 8) + " vs " + fmt(ref, 8)};
}

Verdict model_spectrum() {
  auto ev = symmetric_eigen(reduced_density<double>(build_prime_state(24, 2, primes24()), 12).entries).eigenvalues;
  std::sort(ev.rbegin(), ev.rend());
  const auto opt = ModelOptions<double>::asymptotic(appendix_constants<double>(10'000'000));
  const auto ms = analytic_spectrum<double>(24, 12, opt);
  const auto me = ms.eigenvalues();

  double energy_err = 0, value_err = 0;
  for (std::size_t i = 0; i < 72; ++i) {
    energy_err = std::max(energy_err, std::abs(std::log(me[i]) - std::log(ev[i])) / -std::log(ev[i]));
    value_err = std::max(value_err, std::abs(me[i] - ev[i]) / ev[i]);
  }

  // Cluster boundaries of phi(k) = 1, 2, 4, 6, 8, 10 and the 24-fold level
  // (k = 13, 21) sit at the seven largest gaps of the exact top-72 spectrum.
  std::vector<std::pair<double, std::size_t>> gaps;
  for (std::size_t i = 0; i + 1 < 72; ++i) gaps.emplace_back(ev[i] / ev[i + 1], i);
  std::sort(gaps.rbegin(), gaps.rend());
  std::set<std::size_t> cuts;
  for (int i = 0; i < 7; ++i) cuts.insert(gaps[i].second);
  const bool exact_pattern = cuts == std::set<std::size_t>{0, 2, 6, 12, 20, 30, 54};

  std::vector<std::uint64_t> mult;
  for (const auto& c : ms.clusters()) mult.push_back(c.second);
  const bool model_pattern =
      mult.size() >= 7 && std::vector<std::uint64_t>(mult.begin(), mult.begin() + 7) ==
                              std::vector<std::uint64_t>{1, 2, 4, 6, 8, 10, 24};

  const bool ok = exact_pattern && model_pattern && energy_err <= 0.15;
  return {ok, "degeneracies 1,2,4,6,8,10,24: exact " + std::string(exact_pattern ? "yes" : "no") + ", model " +
                  (model_pattern ? "yes" : "no") + "; max relative energy error " + fmt(energy_err, 3) +
                  " (eigenvalue error " + fmt(value_err, 3) + ")"};
}

Verdict model_fit() {
  const auto opt = ModelOptions<double>::asymptotic(appendix_constants<double>(10'000'000));
  const ArithmeticTable at(model_table_limit(35));
  std::vector<double> x, y;
  for (unsigned h = 13; h <= 35; ++h) {
    x.push_back(h);
    y.push_back(model_entropy<double>(2 * h, at, opt));
  }
  const auto f = least_squares_line(x, y);
  const bool ok = within(f.slope, 0.886793, 0.001) && within(f.intercept, -0.972872, 0.01);

  ModelOptions<double> sums;
  std::vector<double> y2;
  for (unsigned h = 13; h <= 35; ++h) y2.push_back(model_entropy<double>(2 * h, at, sums));
  const auto g = least_squares_line(x, y2);
  return {ok, "slope " + fmt(f.slope, 7) + ", intercept " + fmt(f.intercept, 7) + " (asymptotic k_m, phi_m); " +
                  "exact-sum rule gives " + fmt(g.slope, 7) + ", " + fmt(g.intercept, 7)};
}

Verdict trace_powers_trend() {
  const HLConstants<double> consts(10'000'000);
  const auto primes = sieve_primes(10'000'000);
  bool ok = true;
  std::map<int, std::vector<double>> ratio;
  for (unsigned m = 4; m <= 13; ++m) {
    const auto C = hl_model_matrix(m, consts);
    const auto tp = trace_powers(C.entries, 5);
    for (int s = 2; s <= 5; ++s) ratio[s].push_back(tp[s - 1] / trace_power_asymptotic<double>(m, s, primes));
  }
  std::string detail;
  for (auto& [s, r] : ratio) {
    std::vector<double> mx, ly;
    for (std::size_t i = 0; i < r.size(); ++i) {
      ok = ok && r[i] > 0 && r[i] <= 1 && (i == 0 || r[i] > r[i - 1]);
      if (r[i] < 1) {
        mx.push_back(4.0 + i);
        ly.push_back(std::log(1 - r[i]));
      }
    }
    // Linearity of ln(1 - ratio) in m via the coefficient of determination.
    const auto f = least_squares_line(mx, ly);
    double ss_res = 0, ss_tot = 0, mean = 0;
    for (double v : ly) mean += v / ly.size();
    for (std::size_t i = 0; i < ly.size(); ++i) {
      ss_res += std::pow(ly[i] - f.slope * mx[i] - f.intercept, 2);
      ss_tot += std::pow(ly[i] - mean, 2);
    }
    const double r2 = 1 - ss_res / ss_tot;
    ok = ok && f.slope < 0 && r2 >= 0.95;
    detail += (detail.empty() ? "" : "; ") + std::string("s=") + std::to_string(s) + " ratio(13) " + fmt(r.back(), 5) +
              ", ln(1-ratio) slope " + fmt(f.slope, 3) + " R^2 " + fmt(r2, 4);
  }
  return {ok, detail};
}

double half_chain(const NumberState& st) { return bipartition_entropy<double>(st, st.n() / 2); }

Verdict relatives() {
  const double composite = half_chain(build_odd_composite_state(20, primes24()));
  const double mobius = half_chain(build_mobius_state(24)) - half_chain(build_mobius_state(22));
  double starry = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    starry += half_chain(build_starry_state(24, seed, primes24())) - half_chain(build_starry_state(22, seed, primes24()));
  starry /= 10;
  const quad model = von_neumann(symmetric_eigen(composite_model<quad>(10).entries));
  const bool ok = composite >= 1.5 && composite <= 2.5 && mobius > 0.98 && within(starry, 0.9856, 0.05) &&
                  abs(model) <= quad("1e-25");
  return {ok, "composite S(10,20) " + fmt(composite, 5) + ", Mobius slope " + fmt(mobius, 6) +
                  ", starry slope (10 seeds) " + fmt(starry, 5) + ", composite model S " +
                  fmt(model.convert_to<double>(), 3)};
}

Verdict arithmetic_states() {
  const double pi2 = M_PI * M_PI;
  bool ok = true;
  std::string detail;
  for (std::int64_t alpha : {4, 8}) {
    const double target = alpha == 4 ? 1 + 9 / pi2 : 1 + 15 / pi2;
    detail += (detail.empty() ? "" : "; ") + std::string("target ") + fmt(target, 5) + ":";
    for (std::int64_t beta = 1; beta < alpha; beta += 2) {
      const double s24 = half_chain(build_arithmetic_prime_state(24, alpha, beta, primes24()));
      const double s22 = half_chain(build_arithmetic_prime_state(22, alpha, beta, primes24()));
      const double g = (s24 - s22) * 12 - s24;
      ok = ok && within(g, target, 0.25);
      detail += " gamma_{" + std::to_string(alpha) + "," + std::to_string(beta) + "} " + fmt(g, 5);
    }
  }
  return {ok, detail};
}

Verdict fourier() {
  EntropySeries<double> surface;
  for (unsigned n = 10; n <= 24; n += 2) {
    const auto st = build_prime_state(n, 2, primes24());
    for (unsigned m = 1; m < n; ++m) surface.add(n, m, bipartition_entropy<double>(st, m));
  }
  std::vector<FourierSample> train, held;
  int i = 0;
  for (const auto& x : normalized_samples(surface)) (i++ % 4 == 3 ? held : train).push_back(x);
  const auto f = fourier_fit(train, 8);
  double worst = 0, rms = 0;
  for (const auto& h : held) {
    const double e = f(static_cast<double>(h.m) / h.n) - h.ratio;
    worst = std::max(worst, std::abs(e));
    rms += e * e / held.size();
  }
  const bool ok = within(f.b[0], 0.538987832, 0.02) && within(f.b[1], -0.446006651, 0.02) && worst <= 0.03;
  return {ok, "b'0 " + fmt(f.b[0], 6) + ", b'1 " + fmt(f.b[1], 6) + "; held-out " + std::to_string(held.size()) +
                  " samples max error " + fmt(worst, 3) + ", rms " + fmt(std::sqrt(rms), 3)};
}

Verdict random_baselines() {
  const std::uint64_t seed = 1;
  auto entropy = [&](random_kind kind) {
    const auto rho = reduced_density<double>(build_random_state(12, kind, seed), 6);
    return von_neumann(hermitian_eigenvalues(rho.re, rho.im));
  };
  const double complex = entropy(random_kind::complex), positive = entropy(random_kind::positive);
  // Page mean for a 64 x 64 split, in bits.
  double page = 0;
  for (int k = 65; k <= 4096; ++k) page += 1.0 / k;
  page = (page - 63.0 / 128) / std::log(2.0);
  const bool ok = within(complex, 5.5, 0.1) && within(positive, 0.363 * 6, 0.15);
  return {ok, "complex " + fmt(complex, 5) + " vs 5.5 (Page mean " + fmt(page, 5) + "), positive " +
                  fmt(positive, 5) + " vs " + fmt(0.363 * 6, 4) + ", seed " + std::to_string(seed)};
}

template <class Real>
dense_matrix<Real> random_symmetric(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  dense_matrix<Real> A(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) A(i, j) = A(j, i) = Real(u(rng));
  return A;
}

Verdict eigensolver() {
  // Tolerances at 53 bits: trace dim^2 2^-38, orthogonality dim 2^-38,
  // reconstruction dim 2^-41 |A|_F (the convergence target scaled by dim).
  const double u = std::ldexp(1.0, -53);
  int bad = 0;
  double worst_orth = 0, worst_recon = 0, worst_trace = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + (seed * 101 + 7) % 256;
    const auto A = random_symmetric<double>(n, seed);
    const auto r = symmetric_eigen(A, true);
    const auto& V = *r.vectors;
    double sum = 0;
    for (double l : r.eigenvalues) sum += l;
    const double tr = std::abs(sum - A.trace()) / (n * n * 32768 * u);
    double orth = 0, recon = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double vtv = 0, rec = 0;
        for (std::size_t k = 0; k < n; ++k) {
          vtv += V(k, i) * V(k, j);
          rec += V(i, k) * r.eigenvalues[k] * V(j, k);
        }
        orth = std::max(orth, std::abs(vtv - (i == j)));
        recon = std::max(recon, std::abs(rec - A(i, j)));
      }
    orth /= n * 32768 * u;
    recon /= n * 4096 * u * std::max(1.0, r.input_norm);
    worst_orth = std::max(worst_orth, orth);
    worst_recon = std::max(worst_recon, recon);
    worst_trace = std::max(worst_trace, tr);

    // Precision scaling on a leading block: quad lands far closer to a
    // 256-bit reference than double does.
    const std::size_t b = std::min<std::size_t>(n, 24);
    dense_matrix<double> Ad(b);
    dense_matrix<quad> Aq(b);
    mpfr_precision_scope scope(256);
    dense_matrix<mpfr_real> Am(b);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j) {
        Ad(i, j) = A(i, j);
        Aq(i, j) = A(i, j);
        Am(i, j) = A(i, j);
      }
    const auto ed = symmetric_eigen(Ad).eigenvalues;
    const auto eq = symmetric_eigen(Aq).eigenvalues;
    const auto em = symmetric_eigen(Am).eigenvalues;
    double err_d = 0, err_q = 0;
    for (std::size_t i = 0; i < b; ++i) {
      err_d = std::max(err_d, std::abs((ed[i] - em[i]).convert_to<double>()));
      err_q = std::max(err_q, std::abs((from_decimal<mpfr_real>(to_decimal(eq[i])) - em[i]).convert_to<double>()));
    }
    const bool scaling = err_q <= 1e-30 * b && err_d <= 1e-13 * b;
    if (tr >= 1 || orth >= 1 || recon >= 1 || !scaling) ++bad;
  }
  return {bad == 0, std::to_string(100 - bad) + "/100 seeds; worst error as a fraction of tolerance: trace " + fmt(worst_trace, 3) +
                        ", orthogonality " + fmt(worst_orth, 3) + ", reconstruction " + fmt(worst_recon, 3)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string memo_path;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--memo", memo_path, "cache file for expensive entropies");
  CLI11_PARSE(app, argc, argv);
  Memo memo(memo_path);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"peak formulas vs direct sums", peak_formulas},
      {"bias round trip", bias_round_trip},
      {"Ramanujan structure", ramanujan_structure},
      {"constants alpha, beta, delta", constants},
      {"entropy scaling estimators", [&] { return entropy_scaling(memo); }},
      {"S(20) against the linear fit", [&] { return linear_fit_check(memo); }},
      {"model spectrum at n=24", model_spectrum},
      {"model entropy fit", model_fit},
      {"trace powers", trace_powers_trend},
      {"relatives", relatives},
      {"arithmetic states", arithmetic_states},
      {"Fourier fit", fourier},
      {"random baselines", random_baselines},
      {"eigensolver properties", eigensolver},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::cout << "criterion " << std::setw(2) << id << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << ": " << v.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
