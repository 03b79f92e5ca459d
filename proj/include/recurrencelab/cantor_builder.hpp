#pragma once

// The Cantor-type set F_p, insertion words, insertion plans and the map that
// turns a point of F_p into a point with prescribed return times.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/errors.hpp"
#include "recurrencelab/shift_core.hpp"

namespace recurrencelab
{

// ---------------------------------------------------------------- F_p

inline void check_p(int p)
{
  if (p <= 2) throw argument_error("F_p needs p > 2, got " + std::to_string(p));
}

inline Word build_fp_prefix(int p, const SymbolStream& free_symbols, std::uint64_t length, int m)
{
  check_p(p);
  const FpBase base{p, free_symbols};
  std::vector<Symbol> out(length);
  for (std::uint64_t j = 1; j <= length; ++j) out[j - 1] = fp_symbol(base, j, m);
  return Word(Alphabet(m), std::move(out));
}

/// True iff the finite word is a prefix of some point of F_p.
inline bool fp_membership(const Word& w, int p)
{
  check_p(p);
  const auto up = static_cast<std::uint64_t>(p);
  for (std::uint64_t j = 1; j <= w.length(); ++j) {
    const Symbol s = w.at(j);
    if (j <= up) {
      if (s != 0) return false;
      continue;
    }
    const std::uint64_t r = (j - 1) % up;
    if ((r == 0 || r == up - 1) && s != 1) return false;
  }
  return true;
}

/// Number of unconstrained positions among 1..n.
inline std::uint64_t fp_free_positions(int p, std::uint64_t n)
{
  check_p(p);
  const auto up = static_cast<std::uint64_t>(p);
  if (n <= up) return 0;
  const std::uint64_t whole = n / up - 1; // complete blocks after the leading one
  const std::uint64_t tail = n % up;      // positions of the partial block
  std::uint64_t free = whole * (up - 2);
  if (tail >= 2) free += std::min(tail - 1, up - 2);
  return free;
}

/// Exact number of length-n prefixes of points of F_p over m symbols.
inline BigInt fp_cylinder_count(int p, std::uint64_t n, int m)
{
  if (n < 1) throw argument_error("cylinder depth must be >= 1");
  BigInt out;
  mpz_ui_pow_ui(out.backend().data(), static_cast<unsigned long>(m), fp_free_positions(p, n));
  return out;
}

/// Natural log of fp_cylinder_count, without forming the integer.
inline double fp_log_cylinder_count(int p, std::uint64_t n, int m)
{
  return static_cast<double>(fp_free_positions(p, n)) * std::log(static_cast<double>(m));
}

// ---------------------------------------------------------------- insertion words

/// 1, the first n_k symbols of the prefix, the next symbol plus one (mod m), 1.
inline Word make_insertion_word(const Word& prev_prefix, std::uint64_t n_k)
{
  if (prev_prefix.length() < n_k + 1)
    throw argument_error("insertion word for n_k = " + std::to_string(n_k) + " needs a prefix of length " +
                         std::to_string(n_k + 1) + ", got " + std::to_string(prev_prefix.length()));
  const int m = prev_prefix.alphabet().size();
  std::vector<Symbol> w;
  w.reserve(n_k + 3);
  w.push_back(1);
  const auto s = prev_prefix.symbols();
  w.insert(w.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n_k));
  w.push_back(static_cast<Symbol>((s[n_k] + 1) % m));
  w.push_back(1);
  return Word(prev_prefix.alphabet(), std::move(w));
}

// ---------------------------------------------------------------- plans

enum class CaseTag
{
  i,
  ii,
  iii,
  iv,
  v,
  vi,
  manual
};

inline std::string case_name(CaseTag t)
{
  switch (t) {
  case CaseTag::i: return "i";
  case CaseTag::ii: return "ii";
  case CaseTag::iii: return "iii";
  case CaseTag::iv: return "iv";
  case CaseTag::v: return "v";
  case CaseTag::vi: return "vi";
  case CaseTag::manual: return "manual";
  }
  return "manual";
}

inline CaseTag parse_case_name(const std::string& s)
{
  for (auto t : {CaseTag::i, CaseTag::ii, CaseTag::iii, CaseTag::iv, CaseTag::v, CaseTag::vi, CaseTag::manual})
    if (case_name(t) == s) return t;
  throw argument_error("unknown case tag '" + s + "'");
}

struct PlanTerm
{
  std::size_t i = 0; // 1-based
  BigInt n;
  BigInt ell;
  bool adjusted = false;     // ell raised to keep ell_{i} >= ell_{i-1} + n_{i-1} + 3
  std::optional<double> rho; // exponent used for this term, where the construction has one
};

struct InsertionPlan
{
  int p = 3;
  int m = 2;
  CaseTag case_tag = CaseTag::manual;
  std::vector<PlanTerm> terms;
  bool truncated = false;
  std::string truncation_reason;

  std::size_t size() const { return terms.size(); }
};

inline InsertionPlan make_plan(int p, int m, const std::vector<BigInt>& n, const std::vector<BigInt>& ell,
                               CaseTag tag = CaseTag::manual)
{
  if (n.size() != ell.size()) throw argument_error("plan needs equally many n and ell values");
  InsertionPlan plan;
  plan.p = p;
  plan.m = m;
  plan.case_tag = tag;
  for (std::size_t k = 0; k < n.size(); ++k) plan.terms.push_back({k + 1, n[k], ell[k], false, std::nullopt});
  return plan;
}

struct PlanReport
{
  bool increasing_ok = true;            // both sequences strictly increasing and positive
  std::vector<std::size_t> condition_i_failures; // i with ell_{i+1} < ell_i + n_i + 3
  std::vector<double> ratios;           // i (n_i + 3) / ell_i
  double final_ratio = 0.0;
  bool eventually_nonincreasing = true; // upper envelope of the second half <= that of the first
  bool tail_monotone = true;            // ratios nonincreasing term by term over the second half
  bool condition_ii_ok = false;

  bool condition_i_ok() const { return condition_i_failures.empty(); }
  bool ok() const { return increasing_ok && condition_i_ok() && condition_ii_ok; }
};

/// Checks the spacing condition exactly and reports the density ratios.
///
/// "Eventually nonincreasing" is read on the upper envelope: the largest ratio
/// in the second half of the plan does not exceed the largest in the first.
/// Term-by-term monotonicity is reported separately; it fails for plans whose
/// exponent oscillates even though the ratios still tend to zero.
inline PlanReport check_plan_conditions(const InsertionPlan& plan, double eps)
{
  if (plan.terms.empty()) throw argument_error("empty plan");
  PlanReport r;
  const auto& t = plan.terms;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k].n < 1 || t[k].ell < 1) r.increasing_ok = false;
    if (k > 0 && (t[k].n <= t[k - 1].n || t[k].ell <= t[k - 1].ell)) r.increasing_ok = false;
    if (k + 1 < t.size() && t[k + 1].ell < t[k].ell + t[k].n + 3) r.condition_i_failures.push_back(t[k].i);
    const double lr = std::log(static_cast<double>(t[k].i)) + log_big(t[k].n + 3) - log_big(t[k].ell);
    r.ratios.push_back(std::exp(lr));
  }
  r.final_ratio = r.ratios.back();
  const std::size_t half = r.ratios.size() / 2;
  const auto mid = r.ratios.begin() + static_cast<std::ptrdiff_t>(half);
  const double head_max = half > 0 ? *std::max_element(r.ratios.begin(), mid) : r.ratios.front();
  const double tail_max = *std::max_element(mid, r.ratios.end());
  r.eventually_nonincreasing = tail_max <= head_max * (1.0 + 1e-12);
  for (std::size_t k = half + 1; k < r.ratios.size(); ++k)
    if (r.ratios[k] > r.ratios[k - 1] * (1.0 + 1e-12)) r.tail_monotone = false;
  r.condition_ii_ok = r.final_ratio < eps && r.eventually_nonincreasing;
  return r;
}

/// Index (1-based) of the first term with n_i > p and ell_i - 1 > p; return
/// times are certified for n > n_i from that term on.
inline std::optional<std::size_t> certification_start(const InsertionPlan& plan)
{
  for (const auto& term : plan.terms)
    if (term.n > plan.p && term.ell - 1 > plan.p) return term.i;
  return std::nullopt;
}

struct PredictedReturnTime
{
  BigInt value;          // ell_i
  std::size_t term = 0;  // i with n_{i-1} < n <= n_i
  bool certified = false;
  std::optional<BigInt> threshold; // certified exactly for n > threshold
};

/// R_n = ell_i for n_{i-1} < n <= n_i.
inline PredictedReturnTime predicted_return_time(const InsertionPlan& plan, const BigInt& n)
{
  if (plan.terms.empty()) throw argument_error("empty plan");
  if (n < 1) throw argument_error("n must be >= 1");
  const auto& t = plan.terms;
  const auto it = std::lower_bound(t.begin(), t.end(), n, [](const PlanTerm& term, const BigInt& v) { return term.n < v; });
  if (it == t.end()) throw argument_error("n = " + n.str() + " lies beyond the last plan term n = " + t.back().n.str());
  PredictedReturnTime out;
  out.value = it->ell;
  out.term = it->i;
  if (const auto start = certification_start(plan)) {
    out.threshold = t[*start - 1].n;
    out.certified = n > *out.threshold;
  }
  return out;
}

// ---------------------------------------------------------------- the map g

/// Inserts w_k at ell_k for every k with ell_k - 1 > p and n_k > p (and
/// ell_k <= limit, when given). Each w_k is read from the sequence built so
/// far, so the result equals the sequential construction on those terms.
///
/// Terms with n_k <= p certify nothing, and for n_k = p on a binary alphabet
/// the flipped symbol turns x_{p+1} = 1 into 0, so w_k would carry a second
/// run of p zeros one place after its start; the prefix could then return
/// there ahead of ell_{i+1}. Such terms are skipped.
inline LazySequence apply_insertions(const BaseSource& base, const InsertionPlan& plan,
                                     std::optional<std::uint64_t> limit = std::nullopt,
                                     std::uint64_t cap = kDefaultMaterializationCap)
{
  const Alphabet alphabet(plan.m);
  for (std::size_t k = 1; k < plan.terms.size(); ++k) {
    const auto& a = plan.terms[k - 1];
    const auto& b = plan.terms[k];
    if (b.n <= a.n || b.ell <= a.ell) throw plan_error("plan sequences must be strictly increasing");
    if (b.ell < a.ell + a.n + 3) throw plan_error("plan violates ell_{i+1} >= ell_i + n_i + 3 at i = " + std::to_string(a.i));
  }
  std::vector<InsertionEvent> events;
  LazySequence current(alphabet, base, {}, cap);
  for (const auto& term : plan.terms) {
    if (term.ell - 1 <= plan.p || term.n <= plan.p) continue;
    if (limit && term.ell > *limit) break;
    if (!fits_u64(term.n) || term.n + 1 > cap)
      throw capacity_error("insertion word for term " + std::to_string(term.i) + " needs n_i + 1 = " +
                           BigInt(term.n + 1).str() + " symbols, above the cap");
    const auto nk = to_u64(term.n);
    const Word w = make_insertion_word(current.prefix(nk + 1), nk);
    events.push_back({term.ell, w});
    current = LazySequence(alphabet, base, events, cap);
  }
  return current;
}

} // namespace recurrencelab
