#pragma once

// End-to-end check of a target profile: plan, materialize a prefix of the
// constructed point, compare every certified return time with the plan, and
// compare plan-level rate estimates with the targets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/cantor_builder.hpp"
#include "recurrencelab/ext_real.hpp"
#include "recurrencelab/phi_spec.hpp"
#include "recurrencelab/plan_engine.hpp"
#include "recurrencelab/rate_dim_analysis.hpp"
#include "recurrencelab/return_time.hpp"
#include "recurrencelab/shift_core.hpp"

namespace recurrencelab
{

struct VerifyConfig
{
  PhiSpec phi = log_n_phi();
  ExtReal alpha = 1.0;
  ExtReal beta = 1.0;
  std::size_t horizon = 12;
  std::uint64_t gd_horizon = 1'000'000; // scan horizon for gamma and delta
  std::uint64_t cap = kDefaultMaterializationCap;
  PlanCaps caps;
  std::optional<std::uint64_t> seed; // free F_p symbols; all zero when unset
  double eps = 0.01;                 // threshold for the density ratio i(n_i+3)/ell_i
  double tol = 0.1;                  // relative tolerance for rate estimates
  double tail = 0.5;                 // tail fraction for the rate estimates
};

/// One certified n. When ell + n fits in the prefix the return time must be
/// exactly ell; otherwise the prefix must show no return at all.
struct VerifyCheck
{
  std::uint64_t n = 0;
  std::size_t term = 0;
  BigInt predicted;
  ReturnTimeResult observed;
  bool expect_exact = true;
  bool ok = false;
};

struct RateCheck
{
  std::string name; // "alpha" or "beta"
  ExtReal target;
  double estimate = 0.0;
  bool checked = false; // infinite targets are reported, not checked
  bool ok = true;
};

struct VerifyReport
{
  InsertionPlan plan;
  PlanReport conditions;
  std::uint64_t length = 0;
  std::size_t events = 0;
  std::vector<VerifyCheck> checks;
  std::size_t mismatches = 0;
  std::size_t exact_checks = 0;
  Extremes rates;               // over the points n = n_i
  double beta_at_starts = 0.0;  // sup over the points n = n_{i-1} + 1 as well
  std::vector<RateCheck> rate_checks;
  std::vector<std::string> failures;
  bool pass = false;
};

inline RateCheck check_rate(std::string name, const ExtReal& target, double estimate, double tol)
{
  RateCheck r{std::move(name), target, estimate, !target.is_inf(), true};
  if (r.checked) r.ok = std::abs(estimate - target.value()) <= tol * std::max(target.value(), 1.0);
  return r;
}

inline VerifyReport verify_profile(const VerifyConfig& cfg)
{
  if (cfg.horizon < 1) throw argument_error("horizon must be >= 1");
  if (!(cfg.eps > 0.0) || !(cfg.tol > 0.0)) throw argument_error("tolerances must be positive");
  if (!(cfg.tail > 0.0 && cfg.tail <= 1.0)) throw argument_error("tail fraction must lie in (0, 1]");

  VerifyReport rep;
  rep.plan = plan_full_dimension(make_target(cfg.phi, cfg.alpha, cfg.beta, cfg.gd_horizon), cfg.horizon, cfg.caps);
  const auto& plan = rep.plan;
  if (plan.terms.empty()) throw capacity_error("no plan term fits under the digit cap");
  rep.conditions = check_plan_conditions(plan, cfg.eps);
  if (!rep.conditions.ok()) rep.failures.push_back("plan conditions failed");

  const auto& last = plan.terms.back();
  const BigInt needed = last.ell + last.n + 3;
  const std::uint64_t L = needed < cfg.cap ? to_u64(needed) : cfg.cap;
  const BaseSource base = FpBase{plan.p, cfg.seed ? SymbolStream::seeded(*cfg.seed) : SymbolStream::constant(0)};
  const auto seq = apply_insertions(base, plan, L, cfg.cap);
  const auto word = seq.prefix(L);
  rep.length = L;
  rep.events = seq.events().size();
  const auto R = return_times_all(word);

  // Brackets after the certification start, up to and including the first
  // whose ell lies beyond the prefix.
  if (const auto start = certification_start(plan)) {
    for (std::size_t t = *start + 1; t <= plan.terms.size(); ++t) {
      const auto& lo = plan.terms[t - 2].n;
      const auto& term = plan.terms[t - 1];
      if (lo >= L) break;
      const std::uint64_t from = to_u64(lo) + 1;
      const std::uint64_t to = term.n < L ? to_u64(term.n) : L;
      for (std::uint64_t n = from; n <= to; ++n) {
        VerifyCheck c;
        c.n = n;
        c.term = term.i;
        c.predicted = term.ell;
        c.observed = R[n - 1];
        c.expect_exact = term.ell + n <= L;
        c.ok = c.expect_exact ? (c.observed.is_exact() && BigInt(c.observed.value) == term.ell) : !c.observed.is_exact();
        if (c.expect_exact) ++rep.exact_checks;
        if (!c.ok) ++rep.mismatches;
        rep.checks.push_back(std::move(c));
      }
      if (term.ell > L) break;
    }
  }
  if (rep.checks.empty()) rep.failures.push_back("no certified n inside the materialized prefix");
  if (rep.mismatches > 0) rep.failures.push_back(std::to_string(rep.mismatches) + " return-time mismatches");

  // Within a bracket R_n is constant, so log R_n / phi(n) is smallest at n_i
  // and largest at n_{i-1} + 1. The inf is read at the n_i. For alpha < beta
  // the sup is read at the bracket starts; for alpha = beta both readings tend
  // to the target but the bracket starts do so slowly, so the n_i are used.
  rep.rates = running_extremes(rate_trajectory(plan, cfg.phi), cfg.tail);
  rep.beta_at_starts = running_extremes(rate_trajectory(plan, cfg.phi, true), cfg.tail).beta_hat;
  const double beta_hat = cfg.alpha < cfg.beta ? rep.beta_at_starts : rep.rates.beta_hat;
  rep.rate_checks.push_back(check_rate("alpha", cfg.alpha, rep.rates.alpha_hat, cfg.tol));
  rep.rate_checks.push_back(check_rate("beta", cfg.beta, beta_hat, cfg.tol));
  for (const auto& rc : rep.rate_checks)
    if (!rc.ok) rep.failures.push_back(rc.name + " estimate " + std::to_string(rc.estimate) + " is off target " + rc.target.str());

  rep.pass = rep.failures.empty();
  return rep;
}

} // namespace recurrencelab
