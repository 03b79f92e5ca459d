#pragma once

// First return times R_n and R'_n read off a finite prefix.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "recurrencelab/errors.hpp"
#include "recurrencelab/shift_core.hpp"

namespace recurrencelab
{

/// Either the exact return time or a certified strict lower bound (R > bound).
struct ReturnTimeResult
{
  enum class Kind
  {
    exact,
    lower_bound
  };

  Kind kind = Kind::exact;
  std::uint64_t value = 0;

  static ReturnTimeResult exact(std::uint64_t j) { return {Kind::exact, j}; }
  static ReturnTimeResult lower_bound(std::uint64_t b) { return {Kind::lower_bound, b}; }

  bool is_exact() const { return kind == Kind::exact; }
  std::string kind_name() const { return is_exact() ? "exact" : "lower_bound"; }

  friend bool operator==(const ReturnTimeResult&, const ReturnTimeResult&) = default;
};

namespace detail
{

inline void check_n(const Word& w, std::size_t n)
{
  if (n < 1 || n > w.length())
    throw argument_error("n = " + std::to_string(n) + " outside [1, " + std::to_string(w.length()) + "]");
}

inline bool occurs_at(std::span<const Symbol> s, std::size_t j, std::size_t n)
{
  return std::equal(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n), s.begin() + static_cast<std::ptrdiff_t>(j));
}

} // namespace detail

/// Brute-force R_n: the least j >= 1 with w[j+1..j+n] = w[1..n].
inline ReturnTimeResult return_time_naive(const Word& w, std::size_t n)
{
  detail::check_n(w, n);
  const auto s = w.symbols();
  const std::size_t L = w.length();
  for (std::size_t j = 1; j + n <= L; ++j)
    if (detail::occurs_at(s, j, n)) return ReturnTimeResult::exact(j);
  return ReturnTimeResult::lower_bound(L - n);
}

/// Brute-force R'_n: as R_n but with j >= n.
inline ReturnTimeResult return_time_prime(const Word& w, std::size_t n)
{
  detail::check_n(w, n);
  const auto s = w.symbols();
  const std::size_t L = w.length();
  for (std::size_t j = n; j + n <= L; ++j)
    if (detail::occurs_at(s, j, n)) return ReturnTimeResult::exact(j);
  return ReturnTimeResult::lower_bound(std::max(n - 1, L - n));
}

/// z[j] = length of the longest common prefix of w and w shifted by j (z[0] = L).
inline std::vector<std::size_t> z_function(std::span<const Symbol> s)
{
  const std::size_t L = s.size();
  std::vector<std::size_t> z(L, 0);
  if (L == 0) return z;
  z[0] = L;
  std::size_t l = 0;
  std::size_t r = 0; // [l, r) is the rightmost match window
  for (std::size_t j = 1; j < L; ++j) {
    if (j < r) z[j] = std::min(r - j, z[j - l]);
    while (j + z[j] < L && s[z[j]] == s[j + z[j]]) ++z[j];
    if (j + z[j] > r) {
      l = j;
      r = j + z[j];
    }
  }
  return z;
}

/// R_n for every n = 1..L in linear time; entry n-1 holds R_n.
inline std::vector<ReturnTimeResult> return_times_all(const Word& w)
{
  const std::size_t L = w.length();
  if (L == 0) throw argument_error("return times of an empty word");
  const auto z = z_function(w.symbols());
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  // best[k]: least shift whose common prefix with w is exactly k.
  std::vector<std::size_t> best(L + 1, none);
  for (std::size_t j = 1; j < L; ++j) best[z[j]] = std::min(best[z[j]], j);
  std::vector<ReturnTimeResult> out(L);
  std::size_t running = none;
  for (std::size_t n = L; n >= 1; --n) {
    running = std::min(running, best[n]);
    out[n - 1] = running == none ? ReturnTimeResult::lower_bound(L - n) : ReturnTimeResult::exact(running);
  }
  return out;
}

/// R'_n for every n = 1..L in O(L log L).
inline std::vector<ReturnTimeResult> return_times_prime_all(const Word& w)
{
  const std::size_t L = w.length();
  if (L == 0) throw argument_error("return times of an empty word");
  const auto z = z_function(w.symbols());
  std::vector<std::vector<std::size_t>> by_lcp(L + 1);
  for (std::size_t j = 1; j < L; ++j) by_lcp[z[j]].push_back(j);
  std::set<std::size_t> active; // shifts with lcp >= current n
  std::vector<ReturnTimeResult> out(L);
  for (std::size_t n = L; n >= 1; --n) {
    active.insert(by_lcp[n].begin(), by_lcp[n].end());
    const auto it = active.lower_bound(n);
    out[n - 1] = it == active.end() ? ReturnTimeResult::lower_bound(std::max(n - 1, L - n)) : ReturnTimeResult::exact(*it);
  }
  return out;
}

} // namespace recurrencelab
