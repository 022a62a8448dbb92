// numtheory.hpp
// Integer arithmetic functions, prime sieving and counting, Ramanujan sums,
// Hardy-Littlewood constants and the logarithmic integrals.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ntqs/errors.hpp"
#include "ntqs/real.hpp"

namespace ntqs {

inline constexpr std::uint64_t max_sieve_limit = std::uint64_t{1} << 34;

// ---------------------------------------------------------------------------
// Prime table

// Odd-only sieve: bit i of `words` marks 2i+1 as prime. 2 is implicit.
class PrimeTable {
public:
  PrimeTable() = default;

  std::uint64_t limit() const noexcept { return limit_; }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  bool is_prime(std::uint64_t x) const {
    check(x);
    if (x < 2) return false;
    if (x == 2) return true;
    if ((x & 1) == 0) return false;
    std::uint64_t i = x >> 1;
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  // Number of primes <= x.
  std::uint64_t pi(std::uint64_t x) const {
    check(x);
    if (x < 2) return 0;
    std::uint64_t last = (x - 1) >> 1;  // index of the largest odd <= x
    std::uint64_t w = last >> 6;
    std::uint64_t mask = (last & 63) == 63 ? ~std::uint64_t{0}
                                           : ((std::uint64_t{1} << ((last & 63) + 1)) - 1);
    return 1 + prefix_[w] + static_cast<std::uint64_t>(std::popcount(words_[w] & mask));
  }

  // Primes in [lo, hi] as an iterator range into primes().
  std::pair<std::vector<std::uint64_t>::const_iterator, std::vector<std::uint64_t>::const_iterator>
  range(std::uint64_t lo, std::uint64_t hi) const {
    auto b = std::lower_bound(primes_.begin(), primes_.end(), lo);
    auto e = std::upper_bound(b, primes_.end(), hi);
    return {b, e};
  }

  void check(std::uint64_t x) const {
    if (x > limit_)
      throw capacity_error("value " + std::to_string(x) + " exceeds sieve limit " +
                           std::to_string(limit_));
  }

  static PrimeTable from_words(std::uint64_t limit, std::vector<std::uint64_t> words) {
    PrimeTable t;
    t.limit_ = limit;
    t.words_ = std::move(words);
    t.finish();
    return t;
  }

private:
  void finish() {
    prefix_.assign(words_.size() + 1, 0);
    for (std::size_t w = 0; w < words_.size(); ++w)
      prefix_[w + 1] = prefix_[w] + static_cast<std::uint64_t>(std::popcount(words_[w]));
    primes_.clear();
    primes_.reserve(prefix_.back() + 1);
    if (limit_ >= 2) primes_.push_back(2);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        int b = std::countr_zero(bits);
        primes_.push_back(2 * ((static_cast<std::uint64_t>(w) << 6) + b) + 1);
        bits &= bits - 1;
      }
    }
  }

  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> primes_;
};

namespace detail {

inline std::vector<std::uint64_t> simple_odd_primes(std::uint64_t upto) {
  std::vector<char> composite(upto + 1, 0);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 3; i <= upto; i += 2) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= upto; j += 2 * i) composite[j] = 1;
  }
  return out;
}

inline std::uint64_t isqrt(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

}  // namespace detail

// Segmented Eratosthenes over odd numbers.
inline PrimeTable sieve_primes(std::uint64_t limit) {
  if (limit < 2 || limit > max_sieve_limit)
    throw capacity_error("sieve limit must lie in [2, 2^34], got " + std::to_string(limit));

  const std::uint64_t count = (limit + 1) / 2;  // odd numbers 1, 3, ..., <= limit
  const std::uint64_t nwords = (count + 63) / 64;
  std::vector<std::uint64_t> words(nwords, ~std::uint64_t{0});
  if (count % 64) words.back() = (std::uint64_t{1} << (count % 64)) - 1;
  words[0] &= ~std::uint64_t{1};  // 1 is not prime

  const auto base = detail::simple_odd_primes(detail::isqrt(limit));
  std::vector<std::uint64_t> next(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) next[i] = (base[i] * base[i]) >> 1;

  constexpr std::uint64_t segment_bits = std::uint64_t{1} << 18;
  for (std::uint64_t lo = 0; lo < count; lo += segment_bits) {
    const std::uint64_t hi = std::min(count, lo + segment_bits);
    for (std::size_t i = 0; i < base.size(); ++i) {
      const std::uint64_t p = base[i];
      std::uint64_t j = next[i];
      for (; j < hi; j += p) words[j >> 6] &= ~(std::uint64_t{1} << (j & 63));
      next[i] = j;
    }
  }
  return PrimeTable::from_words(limit, std::move(words));
}

// Cache file: "NTQS1", u64 limit, packed odd-only bitset (u64 words), all little-endian.
inline std::filesystem::path sieve_cache_path(const std::filesystem::path& dir, std::uint64_t limit) {
  return dir / ("sieve_" + std::to_string(limit) + ".bin");
}

namespace detail {

inline void write_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline bool read_u64_le(std::istream& is, std::uint64_t& v) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

// Writes through a temporary file and renames it into place.
inline void write_atomically(const std::filesystem::path& path,
                             const std::function<void(std::ostream&)>& body,
                             std::ios::openmode mode = std::ios::binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, mode | std::ios::trunc);
    if (!os) throw capacity_error("cannot write " + tmp.string());
    body(os);
    if (!os) throw capacity_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline void save_sieve_cache(const PrimeTable& table, const std::filesystem::path& dir) {
  detail::write_atomically(sieve_cache_path(dir, table.limit()), [&](std::ostream& os) {
    os.write("NTQS1", 5);
    detail::write_u64_le(os, table.limit());
    for (auto w : table.words()) detail::write_u64_le(os, w);
  });
}

// Returns an empty optional-like table (limit 0) when the file is missing or malformed.
inline PrimeTable load_sieve_cache(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return {};
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, "NTQS1", 5) != 0) return {};
  std::uint64_t limit = 0;
  if (!detail::read_u64_le(is, limit) || limit < 2 || limit > max_sieve_limit) return {};
  const std::uint64_t nwords = ((limit + 1) / 2 + 63) / 64;
  std::vector<std::uint64_t> words(nwords);
  for (auto& w : words)
    if (!detail::read_u64_le(is, w)) return {};
  return PrimeTable::from_words(limit, std::move(words));
}

// Loads <dir>/sieve_<limit>.bin if present, otherwise sieves and writes it.
inline PrimeTable cached_sieve(std::uint64_t limit, const std::filesystem::path& dir) {
  if (!dir.empty()) {
    auto t = load_sieve_cache(sieve_cache_path(dir, limit));
    if (t.limit() == limit) return t;
  }
  auto t = sieve_primes(limit);
  if (!dir.empty()) save_sieve_cache(t, dir);
  return t;
}

// ---------------------------------------------------------------------------
// Counting functions

inline std::uint64_t pi(std::uint64_t x, const PrimeTable& table) { return table.pi(x); }

// Primes p <= x with p = beta (mod alpha).
inline std::uint64_t pi_mod(std::uint64_t alpha, std::int64_t beta, std::uint64_t x,
                            const PrimeTable& table) {
  if (alpha == 0) throw domain_error("pi_mod: modulus must be positive");
  table.check(x);
  const auto a = static_cast<std::int64_t>(alpha);
  const auto r = static_cast<std::uint64_t>(((beta % a) + a) % a);
  auto [b, e] = table.range(0, x);
  return static_cast<std::uint64_t>(std::count_if(b, e, [&](std::uint64_t p) { return p % alpha == r; }));
}

// pi_{4,3}(x) - pi_{4,1}(x).
inline std::int64_t chebyshev_bias(std::uint64_t x, const PrimeTable& table) {
  return static_cast<std::int64_t>(pi_mod(4, 3, x, table)) -
         static_cast<std::int64_t>(pi_mod(4, 1, x, table));
}

// #{p <= x : p and p + k prime}; needs x + k within the table.
inline std::uint64_t prime_pair_count(std::uint64_t k, std::uint64_t x, const PrimeTable& table) {
  if (k < 2 || (k & 1)) throw domain_error("prime_pair_count: gap must be even and >= 2");
  table.check(x + k);
  auto [b, e] = table.range(0, x);
  return static_cast<std::uint64_t>(
      std::count_if(b, e, [&](std::uint64_t p) { return table.is_prime(p + k); }));
}

// Ordered pairs p < p' <= x, both prime, p = beta1 and p' = beta2 (mod alpha).
inline std::uint64_t pi_mod_pair(std::uint64_t alpha, std::int64_t beta1, std::int64_t beta2,
                                 std::uint64_t x, const PrimeTable& table) {
  if (alpha == 0) throw domain_error("pi_mod_pair: modulus must be positive");
  table.check(x);
  const auto a = static_cast<std::int64_t>(alpha);
  const auto r1 = static_cast<std::uint64_t>(((beta1 % a) + a) % a);
  const auto r2 = static_cast<std::uint64_t>(((beta2 % a) + a) % a);
  std::uint64_t seen_first = 0, pairs = 0;
  auto [b, e] = table.range(0, x);
  for (auto it = b; it != e; ++it) {
    const auto r = *it % alpha;
    if (r == r2) pairs += seen_first;
    if (r == r1) ++seen_first;
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Multiplicative functions

namespace detail {

// Odd primes up to 2^17, enough to factor anything below 2^34.
inline const std::vector<std::uint64_t>& factor_base() {
  static const std::vector<std::uint64_t> base = simple_odd_primes(std::uint64_t{1} << 17);
  return base;
}

}  // namespace detail

struct prime_power {
  std::uint64_t p;
  int e;
};

inline std::vector<prime_power> factorize(std::uint64_t x) {
  if (x == 0) throw domain_error("cannot factorize 0");
  std::vector<prime_power> out;
  if ((x & 1) == 0) {
    int e = std::countr_zero(x);
    out.push_back({2, e});
    x >>= e;
  }
  for (auto p : detail::factor_base()) {
    if (p * p > x) break;
    if (x % p) continue;
    int e = 0;
    while (x % p == 0) {
      x /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (x > 1) out.push_back({x, 1});
  return out;
}

inline int mobius(std::uint64_t x) {
  if (x == 0) throw domain_error("mobius: argument must be >= 1");
  int mu = 1;
  for (const auto& f : factorize(x)) {
    if (f.e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline std::uint64_t totient(std::uint64_t x) {
  if (x == 0) throw domain_error("totient: argument must be >= 1");
  std::uint64_t phi = x;
  for (const auto& f : factorize(x)) phi = phi / f.p * (f.p - 1);
  return phi;
}

// Ramanujan sum c_k(h) = mu(k/g) phi(k) / phi(k/g), g = gcd(k, h).
inline std::int64_t ramanujan_sum(std::uint64_t k, std::int64_t h) {
  if (k == 0) throw domain_error("ramanujan_sum: k must be >= 1");
  const auto g = std::gcd(k, static_cast<std::uint64_t>(h < 0 ? -h : h));
  const auto kg = k / g;
  const int mu = mobius(kg);
  if (mu == 0) return 0;
  return mu * static_cast<std::int64_t>(totient(k) / totient(kg));
}

// mu(0..limit) by sieving: sign flip per prime factor, zero on square factors.
inline std::vector<std::int8_t> mobius_table(std::uint64_t limit) {
  if (limit > max_sieve_limit) throw capacity_error("mobius_table: limit beyond 2^34");
  std::vector<std::int8_t> mu(limit + 1, 1);
  mu[0] = 0;
  std::vector<char> composite(limit + 1, 0);
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t j = p; j <= limit; j += p) {
      composite[j] = j != p;
      mu[j] = static_cast<std::int8_t>(-mu[j]);
    }
    if (p <= limit / p)
      for (std::uint64_t j = p * p; j <= limit; j += p * p) mu[j] = 0;
  }
  return mu;
}

// mu and phi for all integers up to `limit` by a linear sieve.
class ArithmeticTable {
public:
  explicit ArithmeticTable(std::uint64_t limit) {
    if (limit < 1) throw domain_error("ArithmeticTable: limit must be >= 1");
    if (limit > std::numeric_limits<std::uint32_t>::max())
      throw capacity_error("ArithmeticTable: limit must fit in 32 bits");
    limit_ = limit;
    mu_.assign(limit + 1, 0);
    phi_.assign(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    std::vector<char> composite(limit + 1, 0);
    mu_[1] = 1;
    phi_[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (!composite[i]) {
        primes.push_back(static_cast<std::uint32_t>(i));
        mu_[i] = -1;
        phi_[i] = static_cast<std::uint32_t>(i - 1);
      }
      for (auto p : primes) {
        const std::uint64_t ip = i * p;
        if (ip > limit) break;
        composite[ip] = 1;
        if (i % p == 0) {
          mu_[ip] = 0;
          phi_[ip] = phi_[i] * p;
          break;
        }
        mu_[ip] = static_cast<std::int8_t>(-mu_[i]);
        phi_[ip] = phi_[i] * (p - 1);
      }
    }
  }

  std::uint64_t limit() const noexcept { return limit_; }
  int mu(std::uint64_t x) const { return mu_.at(x); }
  std::uint64_t phi(std::uint64_t x) const { return phi_.at(x); }

private:
  std::uint64_t limit_ = 0;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint32_t> phi_;
};

// ---------------------------------------------------------------------------
// Hardy-Littlewood constants

// prod_{2 < p <= cutoff} (1 - 1/(p-1)^2)
template <class Real>
Real twin_prime_constant(std::uint64_t cutoff) {
  if (cutoff < 3) throw domain_error("twin_prime_constant: cutoff must be >= 3");
  Real c2 = 1;
  const auto table = sieve_primes(cutoff);
  for (auto p : table.primes()) {
    if (p == 2) continue;
    Real q = from_int<Real>(static_cast<std::int64_t>(p - 1));
    c2 *= Real(1) - Real(1) / (q * q);
  }
  return c2;
}

template <class Real>
class HLConstants {
public:
  static constexpr std::uint64_t default_cutoff = 10'000'000;

  explicit HLConstants(std::uint64_t cutoff = default_cutoff, std::uint64_t hmax = 1 << 16)
      : cutoff_(cutoff), c2_(twin_prime_constant<Real>(cutoff)) {
    cache_.resize(hmax + 1);
    for (std::uint64_t h = 1; h <= hmax; ++h) cache_[h] = evaluate(h);
  }

  std::uint64_t cutoff() const noexcept { return cutoff_; }
  const Real& c2() const noexcept { return c2_; }

  // C(h) = 2 C2 prod_{p > 2, p | h} (p-1)/(p-2) for even h, 0 for odd h.
  Real operator()(std::uint64_t h) const {
    if (h == 0) throw domain_error("hl_constant: h must be >= 1");
    return h < cache_.size() ? cache_[h] : evaluate(h);
  }

private:
  Real evaluate(std::uint64_t h) const {
    if (h & 1) return Real(0);
    Real c = 2 * c2_;
    for (const auto& f : factorize(h)) {
      if (f.p == 2) continue;
      c *= from_int<Real>(static_cast<std::int64_t>(f.p - 1)) /
           from_int<Real>(static_cast<std::int64_t>(f.p - 2));
    }
    return c;
  }

  std::uint64_t cutoff_;
  Real c2_;
  std::vector<Real> cache_;
};

template <class Real>
Real hl_constant(std::uint64_t h, const HLConstants<Real>& consts) {
  return consts(h);
}

// Truncated Ramanujan-Fourier series sum_{k <= kmax} (mu(k)/phi(k))^2 c_k(h).
template <class Real>
Real hl_constant_series(std::uint64_t h, std::uint64_t kmax) {
  if (h == 0 || (h & 1)) throw domain_error("hl_constant_series: h must be even and positive");
  if (kmax < 1) throw domain_error("hl_constant_series: kmax must be >= 1");
  ArithmeticTable at(kmax);
  compensated_sum<Real> s;
  for (std::uint64_t k = 1; k <= kmax; ++k) {
    if (at.mu(k) == 0) continue;
    const auto c = ramanujan_sum(k, static_cast<std::int64_t>(h));
    if (c == 0) continue;
    Real ph = from_int<Real>(static_cast<std::int64_t>(at.phi(k)));
    s += from_int<Real>(c) / (ph * ph);
  }
  return s.value();
}

// ---------------------------------------------------------------------------
// Logarithmic integrals

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
template <class Real>
struct legendre_rule {
  std::vector<Real> nodes, weights;
};

template <class Real>
legendre_rule<Real> make_legendre_rule(int order) {
  using std::abs;
  using std::cos;
  legendre_rule<Real> rule;
  const Real eps = exp2i<Real>(4 - significand_bits<Real>());
  for (int i = 1; i <= order; ++i) {
    Real x = cos(pi_v<Real>() * (Real(i) - Real(1) / 4) / (Real(order) + Real(1) / 2));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1);
      Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= eps) break;
    }
    rule.nodes.push_back(x);
    rule.weights.push_back(Real(2) / ((1 - x * x) * dp * dp));
  }
  return rule;
}

template <class Real, class F>
Real legendre_panel(const F& f, const legendre_rule<Real>& rule, const Real& a, const Real& b) {
  const Real half = (b - a) / 2, mid = (a + b) / 2;
  compensated_sum<Real> s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s.value();
}

// Adaptive bisection: a panel is accepted when its two halves agree with it
// to `tol`; otherwise each half is refined with tol/2, left before right.
template <class Real, class F>
Real adaptive_legendre(const F& f, const legendre_rule<Real>& rule, const Real& a, const Real& b,
                       const Real& whole, const Real& tol, int depth) {
  using std::abs;
  const Real m = (a + b) / 2;
  const Real left = legendre_panel(f, rule, a, m);
  const Real right = legendre_panel(f, rule, m, b);
  if (depth <= 0 || abs(left + right - whole) <= tol) return left + right;
  return adaptive_legendre(f, rule, a, m, left, tol / 2, depth - 1) +
         adaptive_legendre(f, rule, m, b, right, tol / 2, depth - 1);
}

// int_{ln 2}^{ln x} e^u / u^power du, i.e. int_2^x dt / (ln t)^power.
template <class Real>
Real log_integral(const Real& x, int power) {
  using std::abs;
  using std::exp;
  using std::log;
  if (x < 2) throw domain_error("logarithmic integral needs x >= 2");
  const Real a = log(Real(2)), b = log(x);
  if (b == a) return Real(0);
  auto f = [power](const Real& u) {
    Real d = u;
    for (int i = 1; i < power; ++i) d *= u;
    return exp(u) / d;
  };
  const int bits = significand_bits<Real>();
  const auto rule = make_legendre_rule<Real>(bits <= 64 ? 12 : bits <= 128 ? 24 : 8 + bits / 6);
  // Unit-width starting panels in u; each is refined independently.
  const int panels = std::max(1, static_cast<int>(std::ceil(to_double(b - a))));
  const Real h = (b - a) / panels;
  std::vector<Real> pieces;
  Real rough = 0;
  for (int i = 0; i < panels; ++i) {
    Real l = a + h * i, r = (i + 1 == panels) ? b : a + h * (i + 1);
    pieces.push_back(legendre_panel(f, rule, l, r));
    rough += pieces.back();
  }
  const Real tol = abs(rough) * exp2i<Real>(8 - bits);
  compensated_sum<Real> total;
  for (int i = 0; i < panels; ++i) {
    Real l = a + h * i, r = (i + 1 == panels) ? b : a + h * (i + 1);
    total += adaptive_legendre(f, rule, l, r, pieces[i], tol / panels, 40);
  }
  return total.value();
}

}  // namespace detail

// Li(x) = int_2^x dt / ln t
template <class Real>
Real li(const Real& x) {
  return detail::log_integral(x, 1);
}

// Li_2(x) = int_2^x dt / (ln t)^2
template <class Real>
Real li2(const Real& x) {
  return detail::log_integral(x, 2);
}

// ---------------------------------------------------------------------------
// Square-free sums and the constants of the analytic eigenvalue model

// A(k) = sum_{odd j <= k} mu^2(j) phi(j)
inline std::uint64_t A_sum(std::uint64_t k, const ArithmeticTable& at) {
  if (k < 1 || (k & 1) == 0) throw domain_error("A_sum: k must be odd and >= 1");
  if (k > at.limit()) throw capacity_error("A_sum: k beyond arithmetic table");
  std::uint64_t s = 0;
  for (std::uint64_t j = 1; j <= k; j += 2)
    if (at.mu(j) != 0) s += at.phi(j);
  return s;
}

inline std::uint64_t A_sum(std::uint64_t k) { return A_sum(k, ArithmeticTable(std::max<std::uint64_t>(k, 1))); }

// B(k) = sum_{odd j <= k} mu^2(j) / phi(j)
template <class Real>
Real B_sum(std::uint64_t k, const ArithmeticTable& at) {
  if (k < 1 || (k & 1) == 0) throw domain_error("B_sum: k must be odd and >= 1");
  if (k > at.limit()) throw capacity_error("B_sum: k beyond arithmetic table");
  compensated_sum<Real> s;
  for (std::uint64_t j = 1; j <= k; j += 2)
    if (at.mu(j) != 0) s += Real(1) / from_int<Real>(static_cast<std::int64_t>(at.phi(j)));
  return s.value();
}

template <class Real>
Real B_sum(std::uint64_t k) {
  return B_sum<Real>(k, ArithmeticTable(std::max<std::uint64_t>(k, 1)));
}

template <class Real>
struct AppendixConstants {
  Real alpha;  // A(k) ~ alpha k^2
  Real beta;   // B(k) ~ (ln k + beta) / 2
  Real delta;  // 2 beta - ln(2 alpha)
  std::uint64_t cutoff;
};

// alpha = (2/5) prod_p (1 + (p-1)/p^2)(1 - 1/p)
// beta  = gamma + ln(2)/2 + sum_p ln p / (p (p-1))
// with products and sums over primes p <= cutoff.
template <class Real>
AppendixConstants<Real> appendix_constants(std::uint64_t cutoff = 10'000'000) {
  using std::log;
  if (cutoff < 2) throw domain_error("appendix_constants: cutoff must be >= 2");
  Real prod = 1;
  compensated_sum<Real> prime_sum;
  const auto table = sieve_primes(cutoff);
  for (auto p : table.primes()) {
    Real rp = from_int<Real>(static_cast<std::int64_t>(p));
    prod *= (Real(1) + (rp - 1) / (rp * rp)) * (Real(1) - Real(1) / rp);
    prime_sum += log(rp) / (rp * (rp - 1));
  }
  AppendixConstants<Real> c;
  c.cutoff = cutoff;
  c.alpha = Real(2) / 5 * prod;
  c.beta = euler_gamma_v<Real>() + ln2_v<Real>() / 2 + prime_sum.value();
  c.delta = 2 * c.beta - log(2 * c.alpha);
  return c;
}

}  // namespace ntqs
