// real.hpp
// Extended-precision scalar support. Every algorithm in the library is a
// template over a `Real` type; three backends are wired in:
//
//   53 bits   double
//   113 bits  IEEE binary128 (libquadmath through boost::multiprecision)
//   other     MPFR with a runtime significand width
//
// with_precision() maps a requested width onto one of them.

#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>

#include "ntqs/errors.hpp"

namespace ntqs {

using quad = boost::multiprecision::float128;
// Expression templates off so generic code can rely on plain value semantics.
using mpfr_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                                boost::multiprecision::et_off>;

inline constexpr int default_precision_bits = 113;

template <class Real>
inline constexpr bool is_mpfr_v = std::is_same_v<Real, mpfr_real>;

namespace detail {

// Smallest decimal precision whose MPFR significand holds at least `bits`.
inline unsigned mpfr_digits10_for_bits(int bits) {
  unsigned d10 = 1;
  while (static_cast<int>(boost::multiprecision::detail::digits10_2_2(d10)) < bits) ++d10;
  return d10;
}

}  // namespace detail

// Significand width, in bits, of values of type Real created now.
template <class Real>
int significand_bits() {
  if constexpr (std::is_floating_point_v<Real>) {
    return std::numeric_limits<Real>::digits;
  } else if constexpr (std::is_same_v<Real, quad>) {
    return 113;
  } else {
    return static_cast<int>(
        boost::multiprecision::detail::digits10_2_2(mpfr_real::default_precision()));
  }
}

// Sets the MPFR default precision for the lifetime of the guard.
class mpfr_precision_scope {
public:
  explicit mpfr_precision_scope(int bits) : saved_(mpfr_real::default_precision()) {
    mpfr_real::default_precision(detail::mpfr_digits10_for_bits(bits));
  }
  ~mpfr_precision_scope() { mpfr_real::default_precision(saved_); }
  mpfr_precision_scope(const mpfr_precision_scope&) = delete;
  mpfr_precision_scope& operator=(const mpfr_precision_scope&) = delete;

private:
  unsigned saved_;
};

template <class T>
struct real_tag {
  using type = T;
};

// Invokes f(real_tag<Real>{}) with the backend that serves `bits`.
template <class F>
decltype(auto) with_precision(int bits, F&& f) {
  if (bits < 53) throw domain_error("precision must be at least 53 bits, got " + std::to_string(bits));
  if (bits == 53) return std::forward<F>(f)(real_tag<double>{});
  if (bits == 113) return std::forward<F>(f)(real_tag<quad>{});
  mpfr_precision_scope scope(bits);
  return std::forward<F>(f)(real_tag<mpfr_real>{});
}

template <class Real>
Real pi_v() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
Real ln2_v() {
  return boost::math::constants::ln_two<Real>();
}

template <class Real>
Real euler_gamma_v() {
  return boost::math::constants::euler<Real>();
}

// 2^e as an exact Real.
template <class Real>
Real exp2i(int e) {
  using std::ldexp;
  using boost::multiprecision::ldexp;
  return ldexp(Real(1), e);
}

template <class Real>
Real log2_of(const Real& x) {
  using std::log;
  return log(x) / ln2_v<Real>();
}

template <class Real>
Real from_int(std::int64_t v) {
  if constexpr (std::is_floating_point_v<Real>) {
    return static_cast<Real>(v);
  } else {
    return Real(static_cast<long long>(v));
  }
}

template <class Real>
double to_double(const Real& x) {
  return static_cast<double>(x);
}

// Scientific decimal string with enough digits to round-trip.
template <class Real>
std::string to_decimal(const Real& x) {
  std::ostringstream os;
  if constexpr (std::is_floating_point_v<Real>) {
    os << std::scientific << std::setprecision(std::numeric_limits<Real>::max_digits10) << x;
    return os.str();
  } else if constexpr (std::is_same_v<Real, quad>) {
    return x.str(36, std::ios_base::scientific);
  } else {
    int digits = static_cast<int>(x.precision()) + 3;
    return x.str(digits, std::ios_base::scientific);
  }
}

template <class Real>
Real from_decimal(const std::string& s) {
  if constexpr (std::is_floating_point_v<Real>) {
    return static_cast<Real>(std::stold(s));
  } else {
    return Real(s);
  }
}

// Neumaier-compensated running sum.
template <class Real>
class compensated_sum {
public:
  void add(const Real& x) {
    using std::abs;
    Real t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  compensated_sum& operator+=(const Real& x) {
    add(x);
    return *this;
  }
  Real value() const { return sum_ + carry_; }

private:
  Real sum_{0};
  Real carry_{0};
};

}  // namespace ntqs
