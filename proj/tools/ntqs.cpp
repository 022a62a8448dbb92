// ntqs: command-line front end for number-theoretic quantum states.
//
//   ntqs state prime --n 5
//   ntqs peaks prime --n 12 --ancilla 9
//   ntqs entropy prime --n 20 --m 10
//   ntqs model --fit 26 70
//   ntqs constants
//   ntqs table15
//
// Floating output is written as full-precision decimal strings. Exit codes:
// 0 ok, 2 domain, 3 capacity, 4 convergence, 5 extraction, 1 usage.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ntqs/analysis.hpp"
#include "ntqs/entangle.hpp"
#include "ntqs/numtheory.hpp"
#include "ntqs/spectral.hpp"
#include "ntqs/states.hpp"

using namespace ntqs;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunConfig {
  int precision_bits = default_precision_bits;
  std::string cache_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "json";
  std::string out_dir = ".";
};

struct StateArgs {
  std::string family = "prime";
  unsigned n = 0;
  unsigned q = 2;
  std::int64_t alpha = 4, beta = 1;
};

fs::path cache_dir(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (const char* env = std::getenv("NTQS_CACHE_DIR")) return env;
  return {};
}

PrimeTable table_for(const RunConfig& cfg, std::uint64_t upto) {
  return cached_sieve(std::max<std::uint64_t>(upto, 2), cache_dir(cfg));
}

NumberState build_state(const StateArgs& a, const RunConfig& cfg) {
  const auto& f = a.family;
  const bool needs_primes = f == "prime" || f == "arith" || f == "composite" || f == "starry";
  const auto upto = needs_primes ? register_size(a.q, a.n) - 1 : 0;
  if (f == "prime") return build_prime_state(a.n, a.q, table_for(cfg, upto));
  if (a.q != 2) throw domain_error("family " + f + " is defined for qubits only");
  if (f == "arith") return build_arithmetic_prime_state(a.n, a.alpha, a.beta, table_for(cfg, upto));
  if (f == "composite") return build_odd_composite_state(a.n, table_for(cfg, upto));
  if (f == "squarefree") return build_squarefree_state(a.n);
  if (f == "mobius") return build_mobius_state(a.n);
  if (f == "starry") return build_starry_state(a.n, cfg.seed, table_for(cfg, upto));
  if (f == "uniform") return build_uniform_state(a.n);
  throw domain_error("unknown state family " + f);
}

void add_state_options(CLI::App* cmd, StateArgs& a) {
  cmd->add_option("family", a.family, "prime | arith | composite | squarefree | mobius | starry | uniform")
      ->required();
  cmd->add_option("--n", a.n, "number of digits")->required();
  cmd->add_option("--q", a.q, "local dimension")->check(CLI::Range(2u, 64u));
  cmd->add_option("--alpha", a.alpha, "progression modulus (arith)");
  cmd->add_option("--beta", a.beta, "progression residue (arith)");
}

template <class Real>
json real_json(const Real& x) {
  return to_decimal(x);
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_text(const fs::path& path, const std::string& body) {
  detail::write_atomically(path, [&](std::ostream& os) { os << body; }, std::ios::out);
}

// Data file plus a plotting stub that reads it.
void write_dat(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& rows,
               const std::string& header, const std::string& xlabel, const std::string& ylabel) {
  std::string body = "# " + header + '\n';
  for (const auto& [x, y] : rows) body += x + ' ' + y + '\n';
  write_text(path, body);
  auto gp = path;
  gp.replace_extension(".gp");
  write_text(gp, "set xlabel '" + xlabel + "'\nset ylabel '" + ylabel + "'\nplot '" + path.filename().string() +
                     "' using 1:2 with points notitle\n");
}

// ---------------------------------------------------------------------------

int cmd_state(const StateArgs& a, const RunConfig& cfg, const std::string& export_path) {
  const auto st = build_state(a, cfg);
  if (!export_path.empty()) {
    const fs::path p = export_path;
    if (p.extension() == ".json") save_state_json(st, p);
    else save_state_binary(st, p);
  }
  if (cfg.format == "json")
    emit({{"label", st.label().str()}, {"q", st.q()}, {"n", st.n()}, {"support", st.size()}});
  else
    std::cout << st.size() << '\n';
  return 0;
}

struct PeakArgs {
  bool full = false;
  std::optional<int> ancilla;
  std::optional<std::uint64_t> shots;
};

template <class Real>
int cmd_peaks(const StateArgs& a, const PeakArgs& p, const RunConfig& cfg) {
  const auto st = build_state(a, cfg);
  const auto N = st.dimension();
  json out{{"label", st.label().str()}, {"n", a.n}, {"q", a.q}, {"N", N}, {"support", st.size()},
           {"precision_bits", significand_bits<Real>()}};

  if (a.family == "prime" && a.q == 2 && a.n >= 3) {
    const auto r = closed_form_peaks<Real>(a.n, table_for(cfg, N - 1));
    auto peak = [](const PeakValue<Real>& v) { return json{{"formula", real_json(v.formula)}, {"direct", real_json(v.direct)}}; };
    out["peaks"] = {{"P(0)", peak(r.P0)}, {"P(N/2)", peak(r.PN2)}, {"P(N/3)", peak(r.PN3)},
                    {"P(N/4)", peak(r.PN4)}, {"P(N/6)", peak(r.PN6)}};
    out["counts"] = {{"pi", r.pi},       {"pi_6_1", r.pi61}, {"pi_6_5", r.pi65}, {"pi_3_1", r.pi31},
                     {"pi_3_2", r.pi32}, {"pi_4_1", r.pi41}, {"pi_4_3", r.pi43}, {"delta_4", r.delta}};
    const auto [u, v] = extract_biases(r.PN3.direct, r.PN6.direct, r.pi, N);
    out["extracted"] = {{"pi_6_1", u}, {"pi_6_5", v}, {"abs_delta_4", chebyshev_from_peak(r.PN4.direct, r.pi, N)}};
  } else {
    json peaks;
    peaks["P(0)"] = real_json(qft_probability<Real>(st, Frequency{0, 1, {}}));
    for (std::uint64_t den : {2, 3, 4, 6})
      peaks["P(N/" + std::to_string(den) + ")"] = real_json(qft_probability<Real>(st, Frequency{N, den, {}}));
    out["peaks"] = peaks;
  }

  if (p.ancilla) {
    json anc;
    for (std::uint64_t den : {3, 6}) {
      const auto r = ancilla_peak<Real>(st, den, *p.ancilla);
      anc["N/" + std::to_string(den)] = {{"value", real_json(r.value)}, {"exact", real_json(r.exact)},
                                         {"relative_error", real_json(r.relative_error)}};
    }
    out["ancilla"] = {{"bits", *p.ancilla}, {"peaks", anc}};
  }

  if (p.full || p.shots) {
    const auto P = full_qft_spectrum<Real>(st);
    if (p.full) {
      std::vector<std::pair<std::string, std::string>> rows;
      rows.reserve(P.size());
      for (std::uint64_t k = 0; k < P.size(); ++k) rows.emplace_back(std::to_string(k), to_decimal(P[k]));
      const auto path = fs::path(cfg.out_dir) / ("qft_" + st.label().str() + "_n" + std::to_string(a.n) + ".dat");
      write_dat(path, rows, "k P(k)", "k", "P(k)");
      out["spectrum_file"] = path.string();
    }
    if (p.shots) {
      const auto est = sample_shots(P, *p.shots, cfg.seed);
      json sh;
      auto at = [&](std::uint64_t k, const std::string& name) {
        sh[name] = {{"estimate", est.frequency[k]}, {"standard_error", est.standard_error[k]},
                    {"exact", real_json(P[k])}, {"error", est.frequency[k] - to_double(P[k])}};
      };
      at(0, "P(0)");
      if (N % 2 == 0) at(N / 2, "P(N/2)");
      if (N % 4 == 0) at(N / 4, "P(N/4)");
      out["shots"] = {{"count", *p.shots}, {"seed", cfg.seed}, {"peaks", sh}};
    }
  }
  emit(out);
  return 0;
}

struct EntropyArgs {
  std::optional<unsigned> m;
  bool scan = false;
  bool energies = false;
  std::string csv;
};

template <class Real>
int cmd_entropy(const StateArgs& a, const EntropyArgs& e, const RunConfig& cfg) {
  const bool random = a.family == "random" || a.family == "random_positive";
  std::vector<unsigned> cuts;
  if (e.scan) {
    for (unsigned m = 1; m < a.n; ++m) cuts.push_back(m);
  } else {
    cuts.push_back(e.m.value_or(a.n / 2));
  }

  std::optional<NumberState> st;
  std::optional<RandomState> rs;
  if (random) {
    rs = build_random_state(a.n, a.family == "random" ? random_kind::complex : random_kind::positive, cfg.seed, a.q);
  } else {
    st = build_state(a, cfg);
  }
  const std::string family = random ? a.family + "(" + std::to_string(cfg.seed) + ")" : st->label().str();

  json rows = json::array();
  std::vector<EntropyRow> csv_rows;
  for (unsigned m : cuts) {
    SpectrumResult<Real> spec;
    if (random) {
      const auto rho = reduced_density<Real>(*rs, m);
      spec.eigenvalues = hermitian_eigenvalues(rho.re, rho.im);
      spec.dim = rho.re.dim;
      spec.input_norm = rho.re.frobenius();
    } else {
      const auto side = 2 * m <= a.n ? subsystem::low : subsystem::high;
      spec = symmetric_eigen(reduced_density<Real>(*st, m, side).entries);
    }
    const Real S = von_neumann(spec);
    json row{{"family", family}, {"q", a.q}, {"n", a.n}, {"m", m}, {"entropy_bits", real_json(S)},
             {"prec_bits", significand_bits<Real>()}};
    if (e.energies) {
      json en = json::array();
      for (const auto& x : entanglement_spectrum(spec)) en.push_back(real_json(x));
      row["entanglement_energies_nat"] = en;
    }
    rows.push_back(row);
    csv_rows.push_back({family, a.q, a.n, m, to_decimal(S), significand_bits<Real>()});
  }

  const fs::path csv = e.csv.empty() ? fs::path(cfg.out_dir) / "entropy.csv" : fs::path(e.csv);
  const auto added = append_entropy_csv(csv, csv_rows);
  if (cfg.format == "csv") {
    for (const auto& r : csv_rows)
      std::cout << r.family << ',' << r.q << ',' << r.n << ',' << r.m << ',' << r.entropy_bits << ',' << r.prec_bits
                << '\n';
  } else if (cfg.format == "dat") {
    std::vector<std::pair<std::string, std::string>> dat;
    for (const auto& r : csv_rows) dat.emplace_back(std::to_string(r.m), r.entropy_bits);
    const auto path = fs::path(cfg.out_dir) / ("entropy_" + family + "_n" + std::to_string(a.n) + ".dat");
    write_dat(path, dat, "m S(m,n) [bits]", "m", "S [bits]");
    std::cout << path.string() << '\n';
  } else {
    emit({{"rows", rows}, {"csv", csv.string()}, {"rows_added", added}, {"entropy_unit", "bits"}});
  }
  return 0;
}

struct ModelArgs {
  unsigned n = 0;
  std::optional<unsigned> m;
  std::vector<unsigned> fit;
  std::string rule = "asymptotic";
  std::uint64_t cutoff = 10'000'000;
};

template <class Real>
int cmd_model(const ModelArgs& a, const RunConfig&) {
  ModelOptions<Real> opt;
  if (a.rule == "asymptotic") {
    opt = ModelOptions<Real>::asymptotic(appendix_constants<Real>(a.cutoff));
  } else if (a.rule != "exact") {
    throw domain_error("model rule must be exact or asymptotic");
  }
  if (!a.fit.empty()) {
    if (a.fit.size() != 2 || a.fit[0] > a.fit[1]) throw domain_error("--fit takes two values lo <= hi");
    const ArithmeticTable at(model_table_limit(a.fit[1] / 2));
    std::vector<Real> x, y;
    json pts = json::array();
    for (unsigned n = a.fit[0] + a.fit[0] % 2; n <= a.fit[1]; n += 2) {
      const Real S = model_entropy<Real>(n, at, opt);
      x.push_back(from_int<Real>(n / 2));
      y.push_back(S);
      pts.push_back({{"n", n}, {"S", real_json(S)}});
    }
    const auto f = least_squares_line(x, y);
    emit({{"rule", a.rule}, {"points", pts}, {"slope", real_json(f.slope)}, {"intercept", real_json(f.intercept)},
          {"abscissa", "n/2"}, {"entropy_unit", "bits"}});
    return 0;
  }
  if (a.n == 0) throw domain_error("model needs --n or --fit");
  const unsigned m = a.m.value_or(a.n / 2);
  const auto ms = analytic_spectrum<Real>(a.n, m, opt);
  json clusters = json::array();
  for (const auto& [l, mult] : ms.clusters()) clusters.push_back({{"lambda", real_json(l)}, {"multiplicity", mult}});
  emit({{"rule", a.rule},
        {"n", a.n},
        {"m", m},
        {"k_m", ms.k_m},
        {"phi_m", real_json(ms.phi_m)},
        {"padding", ms.padding},
        {"entropy_bits", real_json(model_entropy(ms))},
        {"clusters", clusters}});
  return 0;
}

template <class Real>
int cmd_constants(std::uint64_t cutoff, const RunConfig&) {
  const auto ac = appendix_constants<Real>(cutoff);
  const auto cc = conjecture_constants<Real>();
  const Real c2 = twin_prime_constant<Real>(cutoff);
  json ga;
  for (const auto& [alpha, g] : cc.gamma_alpha) ga[std::to_string(alpha)] = real_json(g);
  emit({{"cutoff", cutoff},
        {"precision_bits", significand_bits<Real>()},
        {"alpha", real_json(ac.alpha)},
        {"beta", real_json(ac.beta)},
        {"delta", real_json(ac.delta)},
        {"twin_prime_constant", real_json(c2)},
        {"H(3/pi^2)", real_json(cc.slope)},
        {"1+3/pi^2", real_json(cc.intercept)},
        {"gamma_alpha", ga}});
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& family, int K, unsigned min_n, bool even_only) {
  EntropySeries<double> series;
  for (const auto& r : read_entropy_csv(csv))
    if (r.family == family && r.n >= min_n && (!even_only || r.n % 2 == 0)) series.add(r.n, r.m, std::stod(r.entropy_bits));
  const auto f = fourier_fit(series, K);
  json coeffs = json::array();
  for (int k = 0; k < K; ++k) coeffs.push_back({{"k", k}, {"a", f.a[k]}, {"b", f.b[k]}});
  emit({{"family", family}, {"K", K}, {"samples", f.samples}, {"rms_residual", f.rms_residual}, {"coefficients", coeffs}});
  return 0;
}

int cmd_table(std::uint64_t D, const RunConfig& cfg) {
  const auto table = ramanujan_eigen_table(D);
  if (cfg.format == "json") {
    json rows;
    for (const auto& [k, row] : table) rows[std::to_string(k)] = row;
    emit({{"D", D}, {"rows", rows}, {"columns", "a = 1.." + std::to_string(D)}});
  } else {
    std::cout << "k\\a";
    for (std::uint64_t a = 1; a <= D; ++a) std::cout << ' ' << a;
    std::cout << '\n';
    for (const auto& [k, row] : table) {
      std::cout << k;
      for (int v : row) std::cout << ' ' << v;
      std::cout << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Number-theoretic quantum states: QFT peaks, entanglement, analytic models"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  RunConfig cfg;
  app.add_option("--prec", cfg.precision_bits, "significand bits: 53 double, 113 quad, otherwise MPFR")
      ->check(CLI::Range(53, 4096));
  app.add_option("--cache-dir", cfg.cache_dir, "sieve cache directory (default $NTQS_CACHE_DIR)");
  app.add_option("--seed", cfg.seed, "seed for starry, random states and shot sampling");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv", "dat"}));
  app.add_option("--out", cfg.out_dir, "directory for data files");

  StateArgs st_args, pk_args, en_args;
  std::string export_path;
  auto* state = app.add_subcommand("state", "build a state and print its support size");
  add_state_options(state, st_args);
  state->add_option("--export", export_path, "write the state (.json or binary)");

  PeakArgs peaks_opts;
  auto* peaks = app.add_subcommand("peaks", "QFT probabilities at N/2, N/3, N/4, N/6");
  add_state_options(peaks, pk_args);
  peaks->add_flag("--full", peaks_opts.full, "write the full spectrum as a .dat file");
  peaks->add_option("--ancilla", peaks_opts.ancilla, "truncate frequencies to t ancilla bits")->check(CLI::Range(1, 40));
  peaks->add_option("--shots", peaks_opts.shots, "multinomial shot sampling")->check(CLI::PositiveNumber);

  EntropyArgs ent_opts;
  auto* entropy = app.add_subcommand("entropy", "von Neumann entropy of natural bi-partitions");
  add_state_options(entropy, en_args);
  entropy->add_option("--m", ent_opts.m, "number of least significant digits in A");
  entropy->add_flag("--scan", ent_opts.scan, "all cuts m = 1..n-1");
  entropy->add_flag("--energies", ent_opts.energies, "include entanglement energies -ln(lambda)");
  entropy->add_option("--csv", ent_opts.csv, "entropy CSV to append to (default <out>/entropy.csv)");

  ModelArgs model_opts;
  auto* model = app.add_subcommand("model", "analytic spectrum and entropy of the Prime-state model");
  model->add_option("--n", model_opts.n, "number of qubits");
  model->add_option("--m", model_opts.m, "subsystem size (default n/2)");
  model->add_option("--fit", model_opts.fit, "least-squares fit of S(n) over even n in [lo, hi]")->expected(2);
  model->add_option("--rule", model_opts.rule, "k_m and phi_m rule: asymptotic or exact")
      ->check(CLI::IsMember({"asymptotic", "exact"}));
  model->add_option("--cutoff", model_opts.cutoff, "prime cutoff for alpha and delta");

  std::uint64_t const_cutoff = 10'000'000;
  auto* constants = app.add_subcommand("constants", "alpha, beta, delta, C2 and the conjectured constants");
  constants->add_option("--cutoff", const_cutoff, "Euler product cutoff");

  std::string fit_csv, fit_family = "prime";
  int fit_K = 8;
  unsigned fit_min_n = 10;
  bool fit_all_n = false;
  auto* fit = app.add_subcommand("fit", "Fourier fit of S(m,n)/S(n/2,n) from an entropy CSV");
  fit->add_option("--csv", fit_csv, "entropy CSV")->required();
  fit->add_option("--family", fit_family, "family label in the CSV");
  fit->add_option("--K", fit_K, "number of harmonics k = 0..K-1")->check(CLI::Range(1, 64));
  fit->add_option("--min-n", fit_min_n, "smallest n used");
  fit->add_flag("--all-n", fit_all_n, "include odd n (normalized by S(floor(n/2), n))");

  std::uint64_t table_D = 15;
  auto* table = app.add_subcommand("table15", "eigenvalue-location table r_{k,D}(a)/D");
  table->add_option("--D", table_D, "odd square-free D");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(cfg.out_dir);
    auto dispatch = [&](auto run) { return with_precision(cfg.precision_bits, run); };
    if (*state) return cmd_state(st_args, cfg, export_path);
    if (*peaks)
      return dispatch([&](auto tag) { return cmd_peaks<typename decltype(tag)::type>(pk_args, peaks_opts, cfg); });
    if (*entropy)
      return dispatch([&](auto tag) { return cmd_entropy<typename decltype(tag)::type>(en_args, ent_opts, cfg); });
    if (*model) return dispatch([&](auto tag) { return cmd_model<typename decltype(tag)::type>(model_opts, cfg); });
    if (*constants)
      return dispatch([&](auto tag) { return cmd_constants<typename decltype(tag)::type>(const_cutoff, cfg); });
    if (*fit) return cmd_fit(fit_csv, fit_family, fit_K, fit_min_n, !fit_all_n);
    if (*table) return cmd_table(table_D, cfg);
  } catch (const ntqs::error& e) {
    std::cerr << "ntqs: " << e.what() << '\n';
    return static_cast<int>(e.status());
  } catch (const std::exception& e) {
    std::cerr << "ntqs: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
