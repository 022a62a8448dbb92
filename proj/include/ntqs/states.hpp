// states.hpp
// Uniform-amplitude superpositions over base-q digit strings, stored as a
// sorted signed support. Value v is read in base q with digit 0 least
// significant.

#pragma once

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ntqs/errors.hpp"
#include "ntqs/numtheory.hpp"

namespace ntqs {

enum class family {
  prime,
  arith_prime,
  odd_composite,
  odd_squarefree,
  mobius,
  starry,
  uniform,
};

struct state_label {
  family kind = family::prime;
  std::int64_t alpha = 0;  // arith_prime only
  std::int64_t beta = 0;   // arith_prime only
  std::uint64_t seed = 0;  // starry only

  std::string str() const {
    switch (kind) {
      case family::prime: return "prime";
      case family::arith_prime:
        return "arith(" + std::to_string(alpha) + "," + std::to_string(beta) + ")";
      case family::odd_composite: return "odd_composite";
      case family::odd_squarefree: return "odd_squarefree";
      case family::mobius: return "mobius";
      case family::starry: return "starry(" + std::to_string(seed) + ")";
      case family::uniform: return "uniform";
    }
    return "unknown";
  }

  static state_label parse(const std::string& s) {
    state_label l;
    auto args = [&](std::size_t open) {
      auto close = s.find(')', open);
      if (close == std::string::npos) throw domain_error("bad state label: " + s);
      return s.substr(open + 1, close - open - 1);
    };
    if (s == "prime") {
      l.kind = family::prime;
    } else if (s.rfind("arith(", 0) == 0) {
      l.kind = family::arith_prime;
      auto a = args(5);
      auto comma = a.find(',');
      if (comma == std::string::npos) throw domain_error("bad state label: " + s);
      l.alpha = std::stoll(a.substr(0, comma));
      l.beta = std::stoll(a.substr(comma + 1));
    } else if (s == "odd_composite") {
      l.kind = family::odd_composite;
    } else if (s == "odd_squarefree") {
      l.kind = family::odd_squarefree;
    } else if (s == "mobius") {
      l.kind = family::mobius;
    } else if (s.rfind("starry(", 0) == 0) {
      l.kind = family::starry;
      l.seed = std::stoull(args(6));
    } else if (s == "uniform") {
      l.kind = family::uniform;
    } else {
      throw domain_error("unknown state label: " + s);
    }
    return l;
  }

  bool operator==(const state_label&) const = default;
};

class NumberState {
public:
  NumberState(unsigned q, unsigned n, state_label label, std::vector<std::uint64_t> values,
              std::vector<std::int8_t> signs)
      : q_(q), n_(n), label_(label), values_(std::move(values)), signs_(std::move(signs)) {
    if (values_.empty()) throw empty_state_error(label_.str() + " state has empty support");
    if (values_.size() != signs_.size()) throw domain_error("support/sign length mismatch");
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (values_[i] <= values_[i - 1]) throw domain_error("support values must be strictly increasing");
  }

  unsigned q() const noexcept { return q_; }
  unsigned n() const noexcept { return n_; }
  const state_label& label() const noexcept { return label_; }
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }
  const std::vector<std::int8_t>& signs() const noexcept { return signs_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool unsigned_support() const {
    return std::all_of(signs_.begin(), signs_.end(), [](std::int8_t s) { return s > 0; });
  }

  // Hilbert-space dimension q^n.
  std::uint64_t dimension() const {
    std::uint64_t d = 1;
    for (unsigned i = 0; i < n_; ++i) d *= q_;
    return d;
  }

  bool operator==(const NumberState&) const = default;

private:
  unsigned q_;
  unsigned n_;
  state_label label_;
  std::vector<std::uint64_t> values_;
  std::vector<std::int8_t> signs_;
};

// q^n, rejecting anything beyond the sieve range.
inline std::uint64_t register_size(unsigned q, unsigned n) {
  if (q < 2) throw domain_error("base must be >= 2");
  if (n < 1) throw domain_error("digit count must be >= 1");
  std::uint64_t d = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (d > max_sieve_limit / q) throw capacity_error("q^n exceeds 2^34");
    d *= q;
  }
  return d;
}

namespace detail {

inline NumberState unsigned_state(unsigned q, unsigned n, state_label label, std::vector<std::uint64_t> values) {
  std::vector<std::int8_t> signs(values.size(), 1);
  return NumberState(q, n, label, std::move(values), std::move(signs));
}

inline void require_table(const PrimeTable& table, std::uint64_t upto) {
  if (table.limit() < upto)
    throw capacity_error("prime table limit " + std::to_string(table.limit()) + " below " +
                         std::to_string(upto));
}

}  // namespace detail

// Primes below q^n.
inline NumberState build_prime_state(unsigned n, unsigned q, const PrimeTable& table) {
  const auto N = register_size(q, n);
  if (N <= 2) throw empty_state_error("no primes below " + std::to_string(N));
  detail::require_table(table, N - 1);
  auto [b, e] = table.range(0, N - 1);
  return detail::unsigned_state(q, n, {family::prime}, std::vector<std::uint64_t>(b, e));
}

inline NumberState build_prime_state(unsigned n, unsigned q = 2) {
  const auto N = register_size(q, n);
  return build_prime_state(n, q, sieve_primes(std::max<std::uint64_t>(N - 1, 2)));
}

// Primes p < 2^n with p = beta (mod alpha).
inline NumberState build_arithmetic_prime_state(unsigned n, std::int64_t alpha, std::int64_t beta,
                                                const PrimeTable& table) {
  if (alpha < 1) throw domain_error("modulus must be positive");
  if (std::gcd(alpha, beta) != 1) throw domain_error("alpha and beta must be coprime");
  const auto N = register_size(2, n);
  detail::require_table(table, N - 1);
  const auto r = static_cast<std::uint64_t>(((beta % alpha) + alpha) % alpha);
  std::vector<std::uint64_t> values;
  auto [b, e] = table.range(0, N - 1);
  for (auto it = b; it != e; ++it)
    if (*it % static_cast<std::uint64_t>(alpha) == r) values.push_back(*it);
  if (values.empty())
    throw empty_state_error("no primes = " + std::to_string(beta) + " mod " + std::to_string(alpha) +
                            " below 2^" + std::to_string(n));
  return detail::unsigned_state(2, n, {family::arith_prime, alpha, beta}, std::move(values));
}

inline NumberState build_arithmetic_prime_state(unsigned n, std::int64_t alpha, std::int64_t beta) {
  return build_arithmetic_prime_state(n, alpha, beta, sieve_primes(std::max<std::uint64_t>(register_size(2, n) - 1, 2)));
}

// Odd composites in [9, 2^n); 1 is a unit and stays out.
inline NumberState build_odd_composite_state(unsigned n, const PrimeTable& table) {
  const auto N = register_size(2, n);
  detail::require_table(table, N - 1);
  std::vector<std::uint64_t> values;
  for (std::uint64_t v = 9; v < N; v += 2)
    if (!table.is_prime(v)) values.push_back(v);
  if (values.empty()) throw empty_state_error("no odd composite below 2^" + std::to_string(n));
  return detail::unsigned_state(2, n, {family::odd_composite}, std::move(values));
}

inline NumberState build_odd_composite_state(unsigned n) {
  return build_odd_composite_state(n, sieve_primes(std::max<std::uint64_t>(register_size(2, n) - 1, 2)));
}

// Odd square-free s <= 2^n, including 1.
inline NumberState build_squarefree_state(unsigned n) {
  const auto N = register_size(2, n);
  const auto mu = mobius_table(N);
  std::vector<std::uint64_t> values;
  for (std::uint64_t s = 1; s <= N; s += 2)
    if (mu[s] != 0) values.push_back(s);
  return detail::unsigned_state(2, n, {family::odd_squarefree}, std::move(values));
}

// Square-free s <= 2^n with amplitude sign mu(s). For n = 1 the support
// includes s = 2 = 2^n, the only case where a value reaches the register size.
inline NumberState build_mobius_state(unsigned n) {
  const auto N = register_size(2, n);
  const auto mu = mobius_table(N);
  std::vector<std::uint64_t> values;
  std::vector<std::int8_t> signs;
  for (std::uint64_t s = 1; s <= N; ++s)
    if (mu[s] != 0) {
      values.push_back(s);
      signs.push_back(mu[s]);
    }
  return NumberState(2, n, {family::mobius}, std::move(values), std::move(signs));
}

// SplitMix64 finalizer applied to seed + (i+1) * golden gamma. Counter-based,
// so draw i does not depend on how many draws came before it.
inline std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform integer in [0, span) from one 64-bit word (multiply-high).
inline std::uint64_t uniform_below(std::uint64_t word, std::uint64_t span) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word) * span) >> 64);
}

// Each prime p_i < 2^n is replaced by a value drawn from [p_i, p_{i+1}),
// the last interval cut at 2^n.
inline NumberState build_starry_state(unsigned n, std::uint64_t seed, const PrimeTable& table) {
  if (n < 2) throw domain_error("starry state needs n >= 2");
  const auto N = register_size(2, n);
  detail::require_table(table, N - 1);
  auto [b, e] = table.range(0, N - 1);
  std::vector<std::uint64_t> primes(b, e);
  std::vector<std::uint64_t> values(primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const std::uint64_t hi = i + 1 < primes.size() ? primes[i + 1] : N;
    values[i] = primes[i] + uniform_below(splitmix64(seed, i), hi - primes[i]);
  }
  state_label label{family::starry};
  label.seed = seed;
  return detail::unsigned_state(2, n, label, std::move(values));
}

inline NumberState build_starry_state(unsigned n, std::uint64_t seed) {
  return build_starry_state(n, seed, sieve_primes(std::max<std::uint64_t>(register_size(2, n) - 1, 2)));
}

inline NumberState build_uniform_state(unsigned n, unsigned q = 2) {
  const auto N = register_size(q, n);
  std::vector<std::uint64_t> values(N);
  std::iota(values.begin(), values.end(), std::uint64_t{0});
  return detail::unsigned_state(q, n, {family::uniform}, std::move(values));
}

// ---------------------------------------------------------------------------
// Dense random baselines

enum class random_kind { complex, positive };

struct RandomState {
  unsigned q = 2;
  unsigned n = 0;
  random_kind kind = random_kind::complex;
  std::uint64_t seed = 0;
  std::vector<double> re;
  std::vector<double> im;  // all zero for the positive kind

  std::uint64_t dimension() const { return re.size(); }
};

// Gaussian amplitudes via Box-Muller on the counter-based generator:
// complex kind draws i.i.d. complex normals, positive kind takes |N(0,1)|.
inline RandomState build_random_state(unsigned n, random_kind kind, std::uint64_t seed, unsigned q = 2) {
  const auto N = register_size(q, n);
  if (N > (std::uint64_t{1} << 26)) throw capacity_error("dense random states limited to 2^26 amplitudes");
  RandomState st;
  st.q = q;
  st.n = n;
  st.kind = kind;
  st.seed = seed;
  st.re.resize(N);
  st.im.assign(N, 0.0);
  auto unit = [&](std::uint64_t i) {
    // (0, 1], never zero so the logarithm stays finite.
    return (static_cast<double>(splitmix64(seed, i) >> 11) + 1.0) * 0x1p-53;
  };
  const double two_pi = 6.283185307179586476925286766559;
  double norm = 0;
  for (std::uint64_t v = 0; v < N; ++v) {
    const double r = std::sqrt(-2 * std::log(unit(2 * v)));
    const double t = two_pi * unit(2 * v + 1);
    if (kind == random_kind::complex) {
      st.re[v] = r * std::cos(t);
      st.im[v] = r * std::sin(t);
    } else {
      st.re[v] = std::abs(r * std::cos(t));
    }
    norm += st.re[v] * st.re[v] + st.im[v] * st.im[v];
  }
  norm = std::sqrt(norm);
  for (std::uint64_t v = 0; v < N; ++v) {
    st.re[v] /= norm;
    st.im[v] /= norm;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Export

inline nlohmann::json state_to_json(const NumberState& st) {
  nlohmann::json support = nlohmann::json::array();
  for (std::size_t i = 0; i < st.size(); ++i) support.push_back({st.values()[i], st.signs()[i]});
  return {{"q", st.q()}, {"n", st.n()}, {"label", st.label().str()}, {"support", std::move(support)}};
}

inline NumberState state_from_json(const nlohmann::json& j) {
  std::vector<std::uint64_t> values;
  std::vector<std::int8_t> signs;
  for (const auto& e : j.at("support")) {
    values.push_back(e.at(0).get<std::uint64_t>());
    signs.push_back(static_cast<std::int8_t>(e.at(1).get<int>()));
  }
  return NumberState(j.at("q").get<unsigned>(), j.at("n").get<unsigned>(),
                     state_label::parse(j.at("label").get<std::string>()), std::move(values),
                     std::move(signs));
}

inline void save_state_json(const NumberState& st, const std::filesystem::path& path) {
  detail::write_atomically(path, [&](std::ostream& os) { os << state_to_json(st).dump() << '\n'; },
                           std::ios::out);
}

// "NTQS2", u32 q, u32 n, u32 label length, label bytes, u64 count,
// then count x (u64 value, i8 sign); little-endian.
inline void save_state_binary(const NumberState& st, const std::filesystem::path& path) {
  auto u32 = [](std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
  };
  detail::write_atomically(path, [&](std::ostream& os) {
    os.write("NTQS2", 5);
    u32(os, st.q());
    u32(os, st.n());
    const auto label = st.label().str();
    u32(os, static_cast<std::uint32_t>(label.size()));
    os.write(label.data(), static_cast<std::streamsize>(label.size()));
    detail::write_u64_le(os, st.size());
    for (std::size_t i = 0; i < st.size(); ++i) {
      detail::write_u64_le(os, st.values()[i]);
      os.put(static_cast<char>(st.signs()[i]));
    }
  });
}

inline NumberState load_state_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw domain_error("cannot open " + path.string());
  auto bad = [&]() { return domain_error("malformed state file " + path.string()); };
  char magic[5];
  if (!is.read(magic, 5) || std::string(magic, 5) != "NTQS2") throw bad();
  auto u32 = [&]() {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw bad();
    return static_cast<std::uint32_t>(b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t{b[3]} << 24));
  };
  const auto q = u32(), n = u32(), len = u32();
  std::string label(len, '\0');
  if (!is.read(label.data(), len)) throw bad();
  std::uint64_t count = 0;
  if (!detail::read_u64_le(is, count)) throw bad();
  std::vector<std::uint64_t> values(count);
  std::vector<std::int8_t> signs(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    char s;
    if (!detail::read_u64_le(is, values[i]) || !is.get(s)) throw bad();
    signs[i] = static_cast<std::int8_t>(s);
  }
  return NumberState(q, n, state_label::parse(label), std::move(values), std::move(signs));
}

}  // namespace ntqs
