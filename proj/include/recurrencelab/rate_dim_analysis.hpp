#pragma once

// Recurrence-rate trajectories log R_n / phi(n), their tail extremes, close-return
// witnesses, and box-counting slopes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/cantor_builder.hpp"
#include "recurrencelab/errors.hpp"
#include "recurrencelab/phi_spec.hpp"
#include "recurrencelab/return_time.hpp"
#include "recurrencelab/shift_core.hpp"

namespace recurrencelab
{

struct RateEntry
{
  BigInt n;
  BigInt R;            // exact return time, or the certified strict lower bound
  bool exact = true;
  double ratio = 0.0;  // log R / phi(n); for bounds, log(bound + 1) / phi(n) is a lower bound
};

struct RateTrajectory
{
  enum class Source
  {
    word,
    plan
  };
  Source source = Source::word;
  std::vector<RateEntry> entries;
};

/// Word-level trajectory over n_lo..n_hi.
inline RateTrajectory rate_trajectory(const Word& w, const PhiSpec& phi, std::uint64_t n_lo, std::uint64_t n_hi)
{
  if (n_lo < 1 || n_hi < n_lo) throw argument_error("empty n range");
  if (n_hi > w.length()) throw argument_error("n range exceeds the word length");
  const auto r = return_times_all(w);
  RateTrajectory t;
  t.source = RateTrajectory::Source::word;
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
    const auto& res = r[n - 1];
    const double f = eval_phi(phi, n);
    const double lr = res.is_exact() ? std::log(static_cast<double>(res.value)) : std::log(static_cast<double>(res.value) + 1.0);
    t.entries.push_back({BigInt(n), BigInt(res.value), res.is_exact(), lr / f});
  }
  return t;
}

/// Plan-level trajectory: R_n = ell_i at n = n_i; optionally also at the bracket
/// starts n = n_{i-1} + 1, where the ratio is largest within the bracket.
inline RateTrajectory rate_trajectory(const InsertionPlan& plan, const PhiSpec& phi, bool include_bracket_starts = false)
{
  if (plan.terms.empty()) throw argument_error("empty plan");
  RateTrajectory t;
  t.source = RateTrajectory::Source::plan;
  for (std::size_t k = 0; k < plan.terms.size(); ++k) {
    const auto& term = plan.terms[k];
    const double lell = log_big(term.ell);
    if (include_bracket_starts && k > 0) {
      BigInt start = plan.terms[k - 1].n + 1;
      if (start < term.n) {
        const double f = eval_phi(phi, start);
        t.entries.push_back({std::move(start), term.ell, true, lell / f});
      }
    }
    t.entries.push_back({term.n, term.ell, true, lell / eval_phi(phi, term.n)});
  }
  return t;
}

struct Extremes
{
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  std::size_t window = 0;
};

/// inf and sup over the final `tail_fraction` of entries. Bound entries do not
/// enter the inf but do count as evidence for the sup.
inline Extremes running_extremes(const RateTrajectory& traj, double tail_fraction)
{
  if (traj.entries.empty()) throw argument_error("empty trajectory");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw argument_error("tail fraction must lie in (0, 1]");
  const std::size_t N = traj.entries.size();
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(N))));
  Extremes e;
  e.window = window;
  e.alpha_hat = std::numeric_limits<double>::infinity();
  e.beta_hat = -std::numeric_limits<double>::infinity();
  bool any_exact = false;
  for (std::size_t k = N - window; k < N; ++k) {
    const auto& en = traj.entries[k];
    if (en.exact) {
      any_exact = true;
      e.alpha_hat = std::min(e.alpha_hat, en.ratio);
    }
    e.beta_hat = std::max(e.beta_hat, en.ratio);
  }
  if (!any_exact) throw argument_error("no exact return time in the tail window; rates cannot be estimated");
  return e;
}

/// Every n with exact R_n < n^(alpha + eps), each rechecked against the
/// close-return inequality: the shifted word agrees with w on more than
/// R_n^(1/(alpha + eps)) symbols (and on at least n).
inline std::vector<std::uint64_t> close_return_witnesses(const Word& w, double alpha, double eps)
{
  if (!(eps > 0.0)) throw argument_error("eps must be positive");
  if (!(alpha >= 0.0) || !(alpha + eps < 1.0)) throw argument_error("need 0 <= alpha and alpha + eps < 1");
  const double s = alpha + eps;
  const auto r = return_times_all(w);
  const auto z = z_function(w.symbols());
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 1; n <= w.length(); ++n) {
    const auto& res = r[n - 1];
    if (!res.is_exact()) continue;
    const double R = static_cast<double>(res.value);
    if (!(R < std::pow(static_cast<double>(n), s))) continue;
    const auto agreement = z[res.value];
    if (agreement < n || !(static_cast<double>(agreement) > std::pow(R, 1.0 / s)))
      throw std::logic_error("close-return recheck failed at n = " + std::to_string(n));
    out.push_back(n);
  }
  return out;
}

struct BoxDimension
{
  double slope = 0.0;
  bool degenerate = false;
  std::size_t depths = 0;
};

/// Least-squares slope of log N_n against n log m.
inline BoxDimension box_dimension(const std::vector<std::pair<std::uint64_t, double>>& log_counts, int m)
{
  if (log_counts.size() < 3) throw argument_error("box dimension needs at least 3 depths");
  if (m < 2) throw argument_error("alphabet size must be >= 2");
  if (std::all_of(log_counts.begin(), log_counts.end(), [&](const auto& c) { return c.first == log_counts.front().first; }))
    throw argument_error("box dimension needs distinct depths");
  const double lm = std::log(static_cast<double>(m));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto k = static_cast<double>(log_counts.size());
  bool constant = true;
  for (const auto& [n, ly] : log_counts) {
    const double x = static_cast<double>(n) * lm;
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    if (ly != log_counts.front().second) constant = false;
  }
  BoxDimension out;
  out.depths = log_counts.size();
  if (constant) {
    out.degenerate = true;
    return out;
  }
  const double den = k * sxx - sx * sx;
  out.slope = (k * sxy - sx * sy) / den;
  return out;
}

inline BoxDimension box_dimension(const std::vector<std::pair<std::uint64_t, BigInt>>& counts, int m)
{
  std::vector<std::pair<std::uint64_t, double>> logs;
  for (const auto& [n, N] : counts) logs.emplace_back(n, log_big(N));
  return box_dimension(logs, m);
}

/// Depths lo, lo+step, ..., <= hi.
inline std::vector<std::uint64_t> depth_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t step)
{
  if (lo < 1 || hi < lo || step < 1) throw argument_error("invalid depth range");
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

/// Box dimension of F_p from exact cylinder-count exponents.
inline BoxDimension fp_box_dimension(int p, int m, const std::vector<std::uint64_t>& depths)
{
  std::vector<std::pair<std::uint64_t, double>> logs;
  for (const auto n : depths) logs.emplace_back(n, fp_log_cylinder_count(p, n, m));
  return box_dimension(logs, m);
}

} // namespace recurrencelab
