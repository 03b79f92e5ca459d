#pragma once

// Arbitrary-precision integers (GMP) and the few high-precision real
// operations needed to round huge exponentials exactly (MPFR).

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <boost/multiprecision/gmp.hpp>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "recurrencelab/errors.hpp"

namespace recurrencelab
{

using BigInt = boost::multiprecision::mpz_int;

/// Default bound on the number of decimal digits of any generated integer.
inline constexpr std::size_t kDefaultDigitCap = 20000;

inline double log_big(const BigInt& n)
{
  if (n <= 0) throw argument_error("logarithm of a non-positive integer");
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, n.backend().data());
  return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

/// Nearest double, or +inf when the value exceeds the double range.
inline double to_double(const BigInt& n)
{
  if (mpz_sizeinbase(n.backend().data(), 2) > 1023) return n > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  return mpz_get_d(n.backend().data());
}

inline bool fits_u64(const BigInt& n)
{
  return n >= 0 && mpz_sizeinbase(n.backend().data(), 2) <= 64;
}

inline std::uint64_t to_u64(const BigInt& n)
{
  if (!fits_u64(n)) throw capacity_error("integer does not fit in 64 bits: " + n.str().substr(0, 40));
  return n.convert_to<std::uint64_t>();
}

inline BigInt parse_bigint(std::string_view text)
{
  if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos)
    throw argument_error("not a nonnegative decimal integer: '" + std::string(text) + "'");
  return BigInt(std::string(text));
}

/// Owning wrapper around an mpfr_t of fixed precision.
class BigFloat
{
public:
  explicit BigFloat(mpfr_prec_t bits) { mpfr_init2(v_, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN)); }
  ~BigFloat() { mpfr_clear(v_); }
  BigFloat(const BigFloat&) = delete;
  BigFloat& operator=(const BigFloat&) = delete;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

private:
  mpfr_t v_;
};

namespace detail
{

/// Working precision for a quantity whose natural log is about `log_value`.
inline mpfr_prec_t precision_for(double log_value)
{
  const double bits = std::max(0.0, log_value) / std::numbers::ln2;
  return static_cast<mpfr_prec_t>(bits) + 128;
}

inline void check_digit_cap(double log_value, std::size_t digit_cap, const char* what)
{
  if (!std::isfinite(log_value)) throw capacity_error(std::string(what) + ": magnitude is not finite");
  const double digits = log_value / std::numbers::ln10;
  if (digits > static_cast<double>(digit_cap))
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", digits);
    throw capacity_error(std::string(what) + ": about " + buf + " digits exceeds cap of " + std::to_string(digit_cap));
  }
}

inline BigInt to_integer(mpfr_srcptr x, mpfr_rnd_t rnd)
{
  BigInt out;
  mpfr_get_z(out.backend().data(), x, rnd);
  return out;
}

} // namespace detail

inline std::size_t decimal_digits(const BigInt& n)
{
  return n == 0 ? 1 : n.str().size() - (n < 0 ? 1 : 0);
}

/// ceil(e^x), treating x as exact.
inline BigInt ceil_exp(double x, std::size_t digit_cap = kDefaultDigitCap)
{
  detail::check_digit_cap(x, digit_cap, "ceil(exp(x))");
  BigFloat y(detail::precision_for(x));
  mpfr_set_d(y.get(), x, MPFR_RNDN);
  mpfr_exp(y.get(), y.get(), MPFR_RNDN);
  return detail::to_integer(y.get(), MPFR_RNDU);
}

/// floor(e^x), treating x as exact.
inline BigInt floor_exp(double x, std::size_t digit_cap = kDefaultDigitCap)
{
  detail::check_digit_cap(x, digit_cap, "floor(exp(x))");
  BigFloat y(detail::precision_for(x));
  mpfr_set_d(y.get(), x, MPFR_RNDN);
  mpfr_exp(y.get(), y.get(), MPFR_RNDN);
  return detail::to_integer(y.get(), MPFR_RNDD);
}

/// Rounds n^power * scale * log(n) to an integer; n >= 2, scale > 0.
inline BigInt round_pow_scale_log(const BigInt& n, double power, double scale, bool round_up,
                                  std::size_t digit_cap = kDefaultDigitCap)
{
  if (n < 2) throw argument_error("n^a * log n needs n >= 2");
  if (!(scale > 0.0)) throw argument_error("scale must be positive");
  const double ln = log_big(n);
  const double magnitude = power * ln + std::log(scale) + std::log(ln);
  detail::check_digit_cap(magnitude, digit_cap, "n^a log n");
  // The exponent power*log n carries an absolute error that is amplified by its size.
  const auto bits = detail::precision_for(magnitude) +
                    static_cast<mpfr_prec_t>(std::log2(std::max(2.0, std::abs(power) * ln))) + 32;
  BigFloat log_n(bits);
  BigFloat acc(bits);
  mpfr_set_z(acc.get(), n.backend().data(), MPFR_RNDN);
  mpfr_log(log_n.get(), acc.get(), MPFR_RNDN);
  mpfr_mul_d(acc.get(), log_n.get(), power, MPFR_RNDN);
  mpfr_exp(acc.get(), acc.get(), MPFR_RNDN);
  mpfr_mul(acc.get(), acc.get(), log_n.get(), MPFR_RNDN);
  mpfr_mul_d(acc.get(), acc.get(), scale, MPFR_RNDN);
  return detail::to_integer(acc.get(), round_up ? MPFR_RNDU : MPFR_RNDD);
}

/// ceil(n^a log n)
inline BigInt ceil_pow_log(const BigInt& n, double power, std::size_t digit_cap = kDefaultDigitCap)
{
  return round_pow_scale_log(n, power, 1.0, true, digit_cap);
}

/// ceil(n log n)
inline BigInt ceil_n_log_n(const BigInt& n, std::size_t digit_cap = kDefaultDigitCap)
{
  return round_pow_scale_log(n, 1.0, 1.0, true, digit_cap);
}

/// Smallest integer n >= 1 with log n >= x.
inline BigInt smallest_with_log_at_least(double x, std::size_t digit_cap = kDefaultDigitCap)
{
  if (x <= 0.0) return BigInt(1);
  return ceil_exp(x, digit_cap);
}

} // namespace recurrencelab
