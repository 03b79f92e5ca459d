#pragma once

// Dimension classifier and the six constructions of insertion plans for a
// target recurrence profile (phi, alpha, beta).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/cantor_builder.hpp"
#include "recurrencelab/errors.hpp"
#include "recurrencelab/ext_real.hpp"
#include "recurrencelab/phi_spec.hpp"
#include "recurrencelab/subsequences.hpp"

namespace recurrencelab
{

/// 1 iff alpha >= 1/gamma and beta >= 1/delta (1/0 = inf, 1/inf = 0).
inline int dichotomy(const ExtReal& alpha, const ExtReal& beta, const ExtReal& gamma, const ExtReal& delta)
{
  return at_least_reciprocal(alpha, gamma) && at_least_reciprocal(beta, delta) ? 1 : 0;
}

namespace detail
{

/// One of the A/B entries: x*y for finite positive x, y; 1 for x = 0, y = inf; inf for x > 0, y = inf.
inline ExtReal ab_entry(const ExtReal& x, const ExtReal& y, const char* xs, const char* ys)
{
  if (y.is_inf()) return x.is_zero() ? ExtReal(1.0) : ExtReal::infinity();
  if (x.is_finite_positive() && y.is_finite_positive()) return ExtReal(x.value() * y.value());
  throw guard_error(std::string("outside proof-case table: no value assigned for ") + xs + " = " + x.str() + ", " + ys +
                    " = " + y.str());
}

inline bool at_least_one(const ExtReal& x) { return x.is_inf() || x.value() >= 1.0 - kBoundaryRelTol; }

/// a <= b with the same relative slack as the dichotomy boundary.
inline bool le_tol(const ExtReal& a, const ExtReal& b)
{
  if (b.is_inf()) return true;
  if (a.is_inf()) return false;
  return a.value() <= b.value() * (1.0 + kBoundaryRelTol);
}

} // namespace detail

/// A = alpha*gamma and B = beta*delta, with the table's entries for zeros and infinities.
inline std::pair<ExtReal, ExtReal> compute_AB(const ExtReal& alpha, const ExtReal& beta, const ExtReal& gamma,
                                              const ExtReal& delta)
{
  return {detail::ab_entry(alpha, gamma, "alpha", "gamma"), detail::ab_entry(beta, delta, "beta", "delta")};
}

struct ProfileTarget
{
  PhiSpec phi;
  ExtReal alpha;
  ExtReal beta;
  ExtReal gamma;
  ExtReal delta;
  std::optional<ExtReal> A;
  std::optional<ExtReal> B;
};

inline ProfileTarget make_target(const PhiSpec& phi, const ExtReal& alpha, const ExtReal& beta,
                                 std::uint64_t gd_horizon = 1'000'000)
{
  if (beta < alpha) throw argument_error("need alpha <= beta");
  const auto gd = gamma_delta(phi, gd_horizon);
  ProfileTarget t{phi, alpha, beta, gd.gamma, gd.delta, std::nullopt, std::nullopt};
  if (!alpha.is_inf() && !beta.is_inf()) {
    try {
      auto [a, b] = compute_AB(alpha, beta, gd.gamma, gd.delta);
      t.A = a;
      t.B = b;
    } catch (const guard_error&) {
    }
  }
  return t;
}

/// Which construction applies; dispatch follows the order (i)..(vi) and
/// asserts that at most one guard holds.
inline CaseTag select_case(const ExtReal& alpha, const ExtReal& beta, const ExtReal& gamma, const ExtReal& delta)
{
  if (beta < alpha) throw argument_error("need alpha <= beta");
  if (dichotomy(alpha, beta, gamma, delta) == 0)
    throw guard_error("target has dimension zero (alpha = " + alpha.str() + ", beta = " + beta.str() + ", gamma = " +
                      gamma.str() + ", delta = " + delta.str() + "); no construction exists");

  std::vector<CaseTag> hits;
  if (alpha.is_inf() && beta.is_inf()) hits.push_back(CaseTag::i);
  if (beta.is_inf() && !alpha.is_inf()) {
    const bool ok = alpha.is_zero() ? gamma.is_inf() : at_least_reciprocal(gamma, alpha);
    if (ok) hits.push_back(CaseTag::ii);
  }
  if (!alpha.is_inf() && !beta.is_inf()) {
    const auto [A, B] = compute_AB(alpha, beta, gamma, delta);
    using detail::at_least_one;
    if (A.is_inf() && B.is_inf()) hits.push_back(CaseTag::iii);
    if (at_least_one(A) && !A.is_inf() && B.is_inf()) hits.push_back(CaseTag::iv);
    if (at_least_one(A) && detail::le_tol(A, B) && !B.is_inf()) hits.push_back(CaseTag::v);
    if (at_least_one(B) && !B.is_inf() && !detail::le_tol(A, B)) hits.push_back(CaseTag::vi);
  }
  if (hits.size() > 1) throw std::logic_error("case guards overlap; the case table is not exclusive here");
  if (hits.empty())
    throw guard_error("outside proof-case table (alpha = " + alpha.str() + ", beta = " + beta.str() + ", gamma = " +
                      gamma.str() + ", delta = " + delta.str() + ")");
  return hits.front();
}

struct Classification
{
  ExtReal gamma;
  ExtReal delta;
  Provenance provenance = Provenance::analytic;
  int dimension = 0;
  std::optional<ExtReal> A;
  std::optional<ExtReal> B;
  std::optional<CaseTag> case_tag;
  std::string note;
};

inline Classification classify(const PhiSpec& phi, const ExtReal& alpha, const ExtReal& beta,
                               std::uint64_t gd_horizon = 1'000'000)
{
  const auto t = make_target(phi, alpha, beta, gd_horizon);
  Classification c;
  const auto gd = gamma_delta(phi, gd_horizon);
  c.gamma = t.gamma;
  c.delta = t.delta;
  c.provenance = gd.provenance;
  c.dimension = dichotomy(alpha, beta, t.gamma, t.delta);
  c.A = t.A;
  c.B = t.B;
  if (c.dimension == 1) {
    try {
      c.case_tag = select_case(alpha, beta, t.gamma, t.delta);
    } catch (const guard_error& e) {
      c.note = e.what();
    }
  }
  return c;
}

struct PlanCaps
{
  SearchCaps search;
  int p = 3;
  int m = 2;
};

/// rho(x) = C x + D for the case where B < A, with x clamped to [delta, gamma].
struct RhoMap
{
  double C = 0.0;
  double D = 0.0;
  double delta = 0.0;
  ExtReal gamma;

  double operator()(double x) const
  {
    double cx = std::max(x, delta);
    if (!gamma.is_inf()) cx = std::min(cx, gamma.value());
    return C * cx + D;
  }
};

inline RhoMap make_rho(const ExtReal& alpha, const ExtReal& beta, const ExtReal& gamma, const ExtReal& delta)
{
  const double a = alpha.value();
  const double b = beta.value();
  const double d = delta.value();
  if (gamma.is_inf()) return {a, (b - a) * d, d, gamma};
  const double g = gamma.value();
  return {(a * g - b * d) / (g - d), (b - a) * g * d / (g - d), d, gamma};
}

namespace detail
{

/// Appends a term, raising ell to keep the spacing condition if needed.
inline void push_term(InsertionPlan& plan, BigInt n, BigInt ell, std::optional<double> rho = std::nullopt)
{
  PlanTerm t{plan.terms.size() + 1, std::move(n), std::move(ell), false, rho};
  if (!plan.terms.empty()) {
    const auto& prev = plan.terms.back();
    if (t.n <= prev.n) throw std::logic_error("construction produced a non-increasing n sequence");
    const BigInt floor_ell = prev.ell + prev.n + 3;
    if (t.ell < floor_ell) {
      t.ell = floor_ell;
      t.adjusted = true;
    }
  }
  plan.terms.push_back(std::move(t));
}

inline double phi_next(const PhiSpec& phi, const BigInt& n) { return eval_phi(phi, BigInt(n + 1)); }

inline void plan_case_i(const ProfileTarget& t, std::size_t horizon, const PlanCaps& caps, InsertionPlan& plan)
{
  BigInt prev_ell = 1;
  BigInt prev_n = 0;
  for (std::size_t i = 1; i <= horizon; ++i) {
    const double di = static_cast<double>(i);
    BigInt ell = ceil_exp(di * eval_phi(t.phi, static_cast<std::uint64_t>(i)), caps.search.digit_cap);
    ell = std::max(ell, BigInt(prev_ell + prev_n + 3));
    ell = std::max(ell, BigInt(BigInt(i) * i * (i + 3)));
    plan.terms.push_back({i, BigInt(i), ell, false, std::nullopt});
    prev_ell = ell;
    prev_n = i;
  }
}

inline void plan_case_ii(const ProfileTarget& t, std::size_t horizon, const PlanCaps& caps, InsertionPlan& plan)
{
  BigInt prev_n = 1; // n_0 := 1, so phi(n_0 + 1) = phi(2)
  double prev_log = 0.0;
  double prev_ratio = 0.0;
  for (std::size_t i = 1; i <= horizon; ++i) {
    const double di = static_cast<double>(i);
    const double T = di * phi_next(t.phi, prev_n);
    const double lo = std::max(T, prev_log + di * di + 2.0);
    const double lo_strict = std::nextafter(lo, std::numeric_limits<double>::infinity());
    auto pred = [&](const SearchPoint& pt) {
      if (!(pt.log_n > lo)) return false;
      const double v = phi_at(t.phi, pt);
      if (!(v > T)) return false;
      const double r = v / pt.log_n;
      if (t.gamma.is_inf()) return r > prev_ratio && r > di;
      return std::abs(r - t.gamma.value()) < 1.0 / di;
    };
    BigInt n = search_witness(lo_strict, pred, caps.search, witness_step(t.gamma, di),
                              "term " + std::to_string(i) + " of the infinite-beta construction");
    const double log_n = log_big(n);
    BigInt ell;
    if (t.alpha.is_zero()) ell = ceil_n_log_n(n, caps.search.digit_cap);
    else if (t.gamma.is_inf()) ell = ceil_exp(t.alpha.value() * eval_phi(t.phi, n), caps.search.digit_cap);
    else ell = ceil_pow_log(n, t.alpha.value() * t.gamma.value(), caps.search.digit_cap);
    prev_ratio = eval_phi(t.phi, n) / log_n;
    prev_log = log_n;
    prev_n = n;
    push_term(plan, std::move(n), std::move(ell));
  }
}

inline void plan_case_iii(const ProfileTarget& t, std::size_t horizon, const PlanCaps& caps, InsertionPlan& plan)
{
  const double a = t.alpha.value();
  const double b = t.beta.value();
  Subseq2Generator gen(t.phi, Subseq2Variant::bounded_steps, caps.search);
  std::vector<BigInt> m;
  std::vector<double> phim;
  auto get = [&](std::size_t i) { // 1-based
    while (m.size() < i) {
      m.push_back(gen.next());
      phim.push_back(eval_phi(t.phi, m.back()));
    }
    return phim[i - 1];
  };
  // ell_i = ceil(e^{x_i}); terms are emitted as soon as their exponent is known
  // so that a capacity stop keeps everything produced before it.
  auto emit = [&](double x) {
    if (plan.terms.size() >= horizon) return;
    const std::size_t i = plan.terms.size() + 1;
    get(i);
    push_term(plan, m[i - 1], ceil_exp(x, caps.search.digit_cap));
  };
  emit(b * get(1));
  std::size_t k = 1;
  while (plan.terms.size() < horizon) {
    const double phik = get(k);
    const double bar = (2.0 * b / a - 1.0) * phik;
    std::size_t d = 1;
    while (get(k + d) < bar) ++d;
    for (std::size_t j = 1; j < d; ++j) emit((2.0 * b - a) / 2.0 * phik + a / 2.0 * get(k + j));
    emit(a * get(k + d));
    emit(b * get(k + d + 1));
    k = k + d + 1;
  }
}

inline void plan_case_iv(const ProfileTarget& t, std::size_t horizon, const PlanCaps& caps, InsertionPlan& plan)
{
  const double b = t.beta.value();
  std::uint64_t n1 = 3;
  while (b * eval_phi(t.phi, n1 + 1) < std::log(static_cast<double>(n1)) + 2.0) {
    if (++n1 > caps.search.probe_cap) throw search_error("no first term for the infinite-B construction");
  }
  BigInt n = n1;
  for (std::size_t i = 1; i <= horizon; ++i) {
    if (i > 1) {
      BigInt next = ceil_exp(b * phi_next(t.phi, n), caps.search.digit_cap);
      n = std::max(next, BigInt(n + 1));
    }
    push_term(plan, n, ceil_n_log_n(n, caps.search.digit_cap));
  }
}

inline void plan_case_v(const ProfileTarget& t, std::size_t horizon, const PlanCaps& caps, InsertionPlan& plan)
{
  const double A = t.A->value();
  const double C = std::max(1.0, t.B->value() / A);
  const auto seq = build_subseq1(t.phi, C, t.gamma, t.delta, horizon, caps.search);
  for (const auto& n : seq.n) push_term(plan, n, ceil_pow_log(n, A, caps.search.digit_cap));
  if (seq.truncated) throw capacity_error(seq.truncation_reason);
}

inline void plan_case_vi(const ProfileTarget& t, std::size_t horizon, const PlanCaps& caps, InsertionPlan& plan)
{
  const RhoMap rho = make_rho(t.alpha, t.beta, t.gamma, t.delta);
  const double lo = t.beta.value() * t.delta.value();
  const double hi = t.A->is_inf() ? std::numeric_limits<double>::infinity() : t.A->value();
  Subseq2Generator gen(t.phi, Subseq2Variant::slow_growth, caps.search);
  for (std::size_t i = 1; i <= horizon; ++i) {
    BigInt m = gen.next();
    const double phim = eval_phi(t.phi, m);
    const double r = rho(phim / log_big(m));
    if (r < lo * (1.0 - 1e-9) || r > hi * (1.0 + 1e-9))
      throw std::logic_error("rho left [beta*delta, alpha*gamma] at term " + std::to_string(i));
    BigInt ell = round_pow_scale_log(m, r, phim, false, caps.search.digit_cap);
    push_term(plan, std::move(m), std::move(ell), r);
  }
}

} // namespace detail

/// Builds up to `horizon` terms of an insertion plan whose points realize the
/// target profile. Hitting the digit cap ends the plan early with
/// `truncated` set; the terms produced so far are kept.
inline InsertionPlan plan_full_dimension(const ProfileTarget& target, std::size_t horizon, const PlanCaps& caps = {})
{
  if (horizon < 1) throw argument_error("horizon must be >= 1");
  InsertionPlan plan;
  plan.p = caps.p;
  plan.m = caps.m;
  plan.case_tag = select_case(target.alpha, target.beta, target.gamma, target.delta);
  ProfileTarget t = target;
  if (!t.alpha.is_inf() && !t.beta.is_inf()) {
    const auto [A, B] = compute_AB(t.alpha, t.beta, t.gamma, t.delta);
    t.A = A;
    t.B = B;
  }
  try {
    switch (plan.case_tag) {
    case CaseTag::i: detail::plan_case_i(t, horizon, caps, plan); break;
    case CaseTag::ii: detail::plan_case_ii(t, horizon, caps, plan); break;
    case CaseTag::iii: detail::plan_case_iii(t, horizon, caps, plan); break;
    case CaseTag::iv: detail::plan_case_iv(t, horizon, caps, plan); break;
    case CaseTag::v: detail::plan_case_v(t, horizon, caps, plan); break;
    case CaseTag::vi: detail::plan_case_vi(t, horizon, caps, plan); break;
    case CaseTag::manual: break;
    }
  } catch (const capacity_error& e) {
    plan.truncated = true;
    plan.truncation_reason = e.what();
  }
  return plan;
}

inline InsertionPlan plan_full_dimension(const PhiSpec& phi, const ExtReal& alpha, const ExtReal& beta,
                                         std::size_t horizon, const PlanCaps& caps = {})
{
  return plan_full_dimension(make_target(phi, alpha, beta), horizon, caps);
}

} // namespace recurrencelab
