#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "recurrencelab/errors.hpp"

namespace recurrencelab
{

/// Nonnegative extended real: a finite value >= 0 or +inf.
///
/// Reciprocals follow the conventions 1/0 = inf and 1/inf = 0.
class ExtReal
{
public:
  constexpr ExtReal() = default;

  ExtReal(double v) : v_(v) // NOLINT(google-explicit-constructor)
  {
    if (std::isnan(v) || v < 0.0)
      throw argument_error("extended real must be nonnegative, got " + std::to_string(v));
  }

  static ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

  bool is_inf() const { return std::isinf(v_); }
  bool is_zero() const { return v_ == 0.0; }
  bool is_finite_positive() const { return v_ > 0.0 && !is_inf(); }
  double value() const { return v_; }

  ExtReal reciprocal() const
  {
    if (is_zero()) return infinity();
    if (is_inf()) return ExtReal(0.0);
    return ExtReal(1.0 / v_);
  }

  /// Scaling by a finite positive constant; inf stays inf and 0 stays 0.
  ExtReal scaled(double c) const
  {
    if (!(c > 0.0) || std::isinf(c)) throw argument_error("scale factor must be finite and positive");
    if (is_inf() || is_zero()) return *this;
    return ExtReal(v_ * c);
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) { return a.v_ <=> b.v_; }

  /// "inf" or the shortest round-tripping decimal.
  std::string str() const
  {
    if (is_inf()) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << v_;
    return os.str();
  }

  static ExtReal parse(std::string_view text)
  {
    std::string t(text);
    if (t == "inf" || t == "+inf" || t == "infinity" || t == "Inf" || t == "INF") return infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw argument_error("not an extended real: '" + t + "'");
    }
    if (used != t.size()) throw argument_error("not an extended real: '" + t + "'");
    return ExtReal(v);
  }

private:
  double v_ = 0.0;
};

/// Relative slack used when deciding x >= 1/y on the finite branch. Keeps the
/// boundary x*y == 1 stable under rescaling x -> x/c, y -> c*y in floating point.
inline constexpr double kBoundaryRelTol = 1e-12;

/// x >= 1/y under the extended conventions.
inline bool at_least_reciprocal(const ExtReal& x, const ExtReal& y)
{
  if (y.is_inf()) return true;       // 1/inf = 0
  if (y.is_zero()) return x.is_inf(); // 1/0 = inf
  if (x.is_inf()) return true;
  return x.value() * y.value() >= 1.0 - kBoundaryRelTol;
}

} // namespace recurrencelab
