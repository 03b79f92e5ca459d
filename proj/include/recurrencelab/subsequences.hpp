#pragma once

// Subsequence builders used by the planner:
//   build_subseq1   prescribed limsup/liminf of phi(n)/log n and growth log n_{i+1}/log n_i -> C
//   build_subseq2_* slowly growing sequences along which phi increases by bounded steps

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/errors.hpp"
#include "recurrencelab/ext_real.hpp"
#include "recurrencelab/phi_spec.hpp"

namespace recurrencelab
{

struct SearchCaps
{
  std::uint64_t probe_cap = 1'000'000'000; // probes per witness
  std::size_t digit_cap = kDefaultDigitCap;  // decimal digits of any generated integer
};

/// A search candidate. Below e^40 the integer is carried exactly; above it the
/// integer is only materialized once a candidate is accepted.
struct SearchPoint
{
  double log_n = 0.0;
  std::optional<std::uint64_t> small;
};

inline double phi_at(const PhiSpec& phi, const SearchPoint& pt)
{
  return pt.small ? eval_phi(phi, *pt.small) : eval_phi_at_log(phi, pt.log_n);
}

/// phi at the integer following the candidate.
inline double phi_after(const PhiSpec& phi, const SearchPoint& pt, double* log_next = nullptr)
{
  if (pt.small) {
    const std::uint64_t q = *pt.small + 1;
    if (log_next) *log_next = std::log(static_cast<double>(q));
    return eval_phi(phi, q);
  }
  if (log_next) *log_next = pt.log_n;
  return eval_phi_at_log(phi, pt.log_n);
}

namespace detail
{

inline constexpr double kExactLogLimit = 40.0;

inline double digits_of_log(double log_n) { return log_n / std::numbers::ln10; }

} // namespace detail

/// Finds some integer n with log n >= min_log and pred(n). Integers are scanned
/// one by one near the start, then on a geometric grid in log n whose relative
/// spacing is `rel_step`.
inline BigInt search_witness(double min_log, const std::function<bool(const SearchPoint&)>& pred,
                             const SearchCaps& caps, double rel_step, const std::string& what)
{
  if (detail::digits_of_log(min_log) > static_cast<double>(caps.digit_cap))
    throw capacity_error(what + ": search starts beyond the digit cap");
  std::uint64_t probes = 0;
  auto charge = [&] {
    if (++probes > caps.probe_cap)
      throw search_error(what + ": no witness within " + std::to_string(caps.probe_cap) + " probes");
  };

  double x = std::max(min_log, 0.0);
  bool first = true;
  if (x < detail::kExactLogLimit) {
    // smallest integer >= e^min_log, exactly
    std::uint64_t n = std::max<std::uint64_t>(2, to_u64(ceil_exp(x)));
    const std::uint64_t additive_end = n + (1u << 16);
    for (; n < additive_end; ++n) {
      charge();
      const SearchPoint pt{std::log(static_cast<double>(n)), n};
      if (pred(pt)) return BigInt(n);
    }
    x = std::log(static_cast<double>(n));
    first = false;
  }

  while (true) {
    if (!first) x = std::max(x * (1.0 + rel_step), x + 1e-9);
    first = false;
    if (detail::digits_of_log(x) > static_cast<double>(caps.digit_cap))
      throw search_error(what + ": no witness below the digit cap of " + std::to_string(caps.digit_cap));
    charge();
    if (x < detail::kExactLogLimit) {
      const auto n = static_cast<std::uint64_t>(std::ceil(std::exp(x)));
      if (pred(SearchPoint{std::log(static_cast<double>(n)), n})) return BigInt(n);
      continue;
    }
    if (!pred(SearchPoint{x, std::nullopt})) continue;
    BigInt n = smallest_with_log_at_least(x, caps.digit_cap);
    // Re-check on the materialized integer; its log differs from x by < 1/n.
    if (pred(SearchPoint{log_big(n), std::nullopt})) return n;
  }
}

inline bool ratio_near(double ratio, const ExtReal& target, double k)
{
  if (target.is_inf()) return ratio > k;
  return std::abs(ratio - target.value()) < 1.0 / k;
}

inline double witness_step(const ExtReal& target, double k)
{
  const double scale = target.is_inf() ? 1.0 : std::max(1.0, target.value());
  return std::clamp(1.0 / (8.0 * k * scale), 1e-6, 1e-2);
}

// ---------------------------------------------------------------- limsup/liminf subsequence

struct Subseq1Result
{
  std::vector<BigInt> n;
  std::vector<double> log_n;
  std::vector<std::size_t> phase_start;     // k of the phase that produced each term
  std::vector<std::size_t> gamma_witnesses; // 1-based indices of limsup witnesses
  std::vector<std::size_t> delta_witnesses; // 1-based indices m' (the witness itself is m' + 1)
  bool truncated = false;
  std::string truncation_reason;
};

/// Sequence with limsup phi(n_i)/log n_i = gamma, liminf phi(n_i+1)/log(n_i+1) = delta,
/// log n_{i+1}/log n_i -> C and log n_i / i -> infinity. At most `horizon` terms.
inline Subseq1Result build_subseq1(const PhiSpec& phi, double C, const ExtReal& gamma, const ExtReal& delta,
                                   std::size_t horizon, const SearchCaps& caps = {})
{
  if (!(C >= 1.0) || !std::isfinite(C)) throw argument_error("growth constant C must be finite and >= 1");
  if (horizon < 1) throw argument_error("horizon must be >= 1");
  Subseq1Result out;
  auto push = [&](BigInt v, std::size_t phase) {
    out.log_n.push_back(log_big(v));
    out.n.push_back(std::move(v));
    out.phase_start.push_back(phase);
  };
  push(BigInt(3), 1);

  bool want_gamma = true;
  try {
    while (out.n.size() < horizon) {
      const std::size_t k = out.n.size();
      const double log_nk = out.log_n.back();
      const ExtReal& target = want_gamma ? gamma : delta;
      const double kd = static_cast<double>(k);
      const std::string what = std::string(want_gamma ? "limsup" : "liminf") + " witness for k = " + std::to_string(k);

      const double min_log = C > 1.0 ? log_nk * std::pow(C, kd) : (kd + 1.0) * (kd + 1.0);
      auto pred = [&](const SearchPoint& pt) {
        if (want_gamma) return ratio_near(phi_at(phi, pt) / pt.log_n, target, kd);
        double log_next = 0.0;
        const double v = phi_after(phi, pt, &log_next);
        return ratio_near(v / log_next, target, kd);
      };
      const BigInt m = search_witness(min_log, pred, caps, witness_step(target, kd), what);
      const double log_m = log_big(m);

      std::size_t d = 0;
      if (C > 1.0) {
        const double span = std::log(log_m) - std::log(log_nk);
        d = static_cast<std::size_t>(std::floor(span / std::log(C)));
        d = std::max<std::size_t>(d, 1);
        for (std::size_t j = 1; j < d && out.n.size() < horizon; ++j) {
          const double y = std::log(log_nk) + static_cast<double>(j) / static_cast<double>(d) * span;
          push(ceil_exp(std::exp(y), caps.digit_cap), k);
        }
      } else {
        d = static_cast<std::size_t>(std::floor(std::sqrt(log_m) - kd));
        d = std::max<std::size_t>(d, 1);
        for (std::size_t j = 1; j < d && out.n.size() < horizon; ++j) {
          const double e = kd + static_cast<double>(j);
          push(ceil_exp(e * e, caps.digit_cap), k);
        }
      }
      if (out.n.size() >= horizon) break;
      push(m, k);
      (want_gamma ? out.gamma_witnesses : out.delta_witnesses).push_back(out.n.size());
      want_gamma = !want_gamma;
    }
  } catch (const capacity_error& e) {
    out.truncated = true;
    out.truncation_reason = e.what();
  }
  return out;
}

// ---------------------------------------------------------------- threshold subsequences

enum class Subseq2Variant
{
  bounded_steps, // phi steps of size in (1, 3]
  slow_growth    // m_{i+1} >= m_i log m_i or a phi step above 1
};

/// Lazily produces m_1, m_2, ... for the bounded-step or the slow-growth variant.
class Subseq2Generator
{
public:
  Subseq2Generator(PhiSpec phi, Subseq2Variant variant, SearchCaps caps = {}, BigInt n1 = 3)
      : phi_(std::move(phi)), variant_(variant), caps_(caps)
  {
    if (n1 < 3) throw argument_error("the first term must be >= 3");
    n_.push_back(std::move(n1));
    phi_n_.push_back(eval_phi(phi_, n_.back()));
  }

  /// Next m_i; throws capacity_error once the digit cap is reached.
  BigInt next()
  {
    const std::size_t i = produced_; // 0-based index of m being produced
    while (n_.size() < i + 2) extend();
    const double jump = phi_n_[i + 1] - phi_n_[i];
    ++produced_;
    return jump <= 2.0 ? n_[i] : BigInt(n_[i + 1] - 1);
  }

  const PhiSpec& phi() const { return phi_; }

private:
  void extend()
  {
    const BigInt& cur = n_.back();
    const double target = phi_n_.back() + 1.0;
    BigInt next;
    if (variant_ == Subseq2Variant::slow_growth) {
      BigInt c = ceil_n_log_n(cur, caps_.digit_cap);
      check_digits(c);
      if (eval_phi(phi_, c) > target) next = first_exceeding(cur, target, c);
      else next = std::move(c);
    } else {
      next = first_exceeding(cur, target, std::nullopt);
    }
    phi_n_.push_back(eval_phi(phi_, next));
    n_.push_back(std::move(next));
  }

  void check_digits(const BigInt& v) const
  {
    if (decimal_digits(v) > caps_.digit_cap)
      throw capacity_error("subsequence term exceeds the digit cap of " + std::to_string(caps_.digit_cap));
  }

  /// min{ n > from : phi(n) > target }, by doubling then bisection. `known`
  /// is an upper point already known to exceed the target.
  BigInt first_exceeding(const BigInt& from, double target, std::optional<BigInt> known)
  {
    BigInt lo = from; // phi(lo) <= target
    BigInt hi;
    if (known) {
      hi = *known;
    } else {
      BigInt step = 1;
      std::uint64_t probes = 0;
      while (true) {
        hi = from + step;
        if (decimal_digits(hi) > caps_.digit_cap)
          throw search_error("phi does not exceed " + std::to_string(target) + " below the digit cap; it may be bounded");
        if (++probes > caps_.probe_cap) throw search_error("threshold search exceeded the probe cap");
        if (eval_phi(phi_, hi) > target) break;
        lo = hi;
        step *= 2;
      }
    }
    while (hi - lo > 1) {
      BigInt mid = (lo + hi) / 2;
      if (eval_phi(phi_, mid) > target) hi = std::move(mid);
      else lo = std::move(mid);
    }
    return hi;
  }

  PhiSpec phi_;
  Subseq2Variant variant_;
  SearchCaps caps_;
  std::vector<BigInt> n_;
  std::vector<double> phi_n_;
  std::size_t produced_ = 0;
};

struct Subseq2Result
{
  std::vector<BigInt> m;
  bool truncated = false;
  std::string truncation_reason;
};

inline Subseq2Result build_subseq2(const PhiSpec& phi, Subseq2Variant variant, std::size_t horizon, const SearchCaps& caps = {})
{
  Subseq2Result out;
  Subseq2Generator gen(phi, variant, caps);
  try {
    while (out.m.size() < horizon) out.m.push_back(gen.next());
  } catch (const capacity_error& e) {
    out.truncated = true;
    out.truncation_reason = e.what();
  }
  return out;
}

/// Bounded steps: phi(m_{i+1}) - phi(m_i + 1) <= 3 and phi(m_{i+1}) - phi(m_i) > 1.
inline Subseq2Result build_subseq2_i(const PhiSpec& phi, std::size_t horizon, const SearchCaps& caps = {})
{
  return build_subseq2(phi, Subseq2Variant::bounded_steps, horizon, caps);
}

/// Slow growth: phi(m_{i+1})/phi(m_i + 1) -> 1, log m_{i+1}/log m_i -> 1, and each step
/// has m_{i+1} >= m_i log m_i or phi(m_{i+1}) - phi(m_i) > 1.
inline Subseq2Result build_subseq2_ii(const PhiSpec& phi, std::size_t horizon, const SearchCaps& caps = {})
{
  return build_subseq2(phi, Subseq2Variant::slow_growth, horizon, caps);
}

} // namespace recurrencelab
