#pragma once

// Symbols, finite words, lazily indexed infinite sequences over the full
// shift on m symbols, and the (finite-prefix) shift metric.
//
// Positions are 1-based everywhere in the public API.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/errors.hpp"

namespace recurrencelab
{

using Symbol = std::uint8_t;

/// Default number of symbols a LazySequence may materialize.
inline constexpr std::uint64_t kDefaultMaterializationCap = 10'000'000;

class Alphabet
{
public:
  explicit Alphabet(int m) : m_(m)
  {
    if (m < 2 || m > 256) throw argument_error("alphabet size must be in [2, 256], got " + std::to_string(m));
  }

  int size() const { return m_; }
  bool contains(int s) const { return s >= 0 && s < m_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
  int m_;
};

namespace detail
{

inline constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";

inline int digit_value(char c)
{
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return -1;
}

} // namespace detail

/// A finite word over an alphabet.
class Word
{
public:
  explicit Word(Alphabet alphabet) : alphabet_(alphabet) {}

  Word(Alphabet alphabet, std::vector<Symbol> symbols) : alphabet_(alphabet), symbols_(std::move(symbols))
  {
    for (std::size_t k = 0; k < symbols_.size(); ++k)
      if (!alphabet_.contains(symbols_[k]))
        throw argument_error("symbol " + std::to_string(symbols_[k]) + " at position " + std::to_string(k + 1) +
                             " is outside the alphabet of size " + std::to_string(alphabet_.size()));
  }

  /// Parses a digit string ('0'-'9', then 'a'-'z' for m > 10).
  static Word parse(std::string_view digits, Alphabet alphabet)
  {
    std::vector<Symbol> symbols;
    symbols.reserve(digits.size());
    for (std::size_t k = 0; k < digits.size(); ++k) {
      const int v = detail::digit_value(digits[k]);
      if (v < 0 || !alphabet.contains(v))
        throw parse_error("invalid symbol '" + std::string(1, digits[k]) + "' for alphabet of size " +
                              std::to_string(alphabet.size()),
                          k);
      symbols.push_back(static_cast<Symbol>(v));
    }
    return Word(alphabet, std::move(symbols));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  std::span<const Symbol> symbols() const { return symbols_; }

  /// The j-th symbol, 1 <= j <= length().
  Symbol at(std::size_t j) const
  {
    if (j == 0 || j > symbols_.size())
      throw argument_error("word index " + std::to_string(j) + " outside [1, " + std::to_string(symbols_.size()) + "]");
    return symbols_[j - 1];
  }

  Word prefix(std::size_t length) const
  {
    if (length > symbols_.size()) throw argument_error("prefix longer than word");
    return Word(alphabet_, std::vector<Symbol>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(length)));
  }

  std::string str() const
  {
    if (alphabet_.size() > static_cast<int>(detail::kDigits.size()))
      throw argument_error("digit-string form supports at most 36 symbols");
    std::string out(symbols_.size(), '0');
    for (std::size_t k = 0; k < symbols_.size(); ++k) out[k] = detail::kDigits[symbols_[k]];
    return out;
  }

  friend bool operator==(const Word&, const Word&) = default;

private:
  Alphabet alphabet_;
  std::vector<Symbol> symbols_;
};

/// Result of comparing two equal-length prefixes under d(x,y) = m^-k.
struct PrefixDistance
{
  std::size_t agreement = 0;    ///< number of leading symbols that agree
  double value = 0.0;           ///< m^-agreement, or 0 when indistinguishable
  bool indistinguishable = false; ///< no disagreement within the compared length
};

/// Finite-prefix approximation of the shift metric. When the words agree
/// everywhere the value is reported as 0 and flagged as indistinguishable at
/// this depth; the true distance of any extensions is then at most m^-length.
inline PrefixDistance distance(const Word& x, const Word& y)
{
  if (!(x.alphabet() == y.alphabet())) throw argument_error("distance: alphabet mismatch");
  if (x.length() != y.length()) throw argument_error("distance: words must have equal length");
  const auto xs = x.symbols();
  const auto ys = y.symbols();
  const auto diff = std::mismatch(xs.begin(), xs.end(), ys.begin());
  PrefixDistance d;
  d.agreement = static_cast<std::size_t>(diff.first - xs.begin());
  if (diff.first == xs.end()) {
    d.indistinguishable = true;
    d.value = 0.0;
  } else {
    d.value = std::pow(static_cast<double>(x.alphabet().size()), -static_cast<double>(d.agreement));
  }
  return d;
}

/// Deterministic, randomly addressable source of "free" symbols.
class SymbolStream
{
public:
  struct Constant
  {
    Symbol symbol = 0;
  };
  struct Seeded
  {
    std::uint64_t seed = 0;
  };
  struct Explicit
  {
    std::vector<Symbol> symbols;
  };

  SymbolStream() = default;
  static SymbolStream constant(Symbol s) { return SymbolStream(Constant{s}); }
  static SymbolStream seeded(std::uint64_t seed) { return SymbolStream(Seeded{seed}); }
  static SymbolStream explicit_symbols(std::vector<Symbol> symbols) { return SymbolStream(Explicit{std::move(symbols)}); }

  /// k-th symbol of the stream (1-based), reduced into [0, m).
  Symbol at(std::uint64_t k, int m) const
  {
    return std::visit(
        [&](const auto& s) -> Symbol {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Constant>) {
            if (s.symbol >= m) throw argument_error("constant free symbol outside alphabet");
            return s.symbol;
          } else if constexpr (std::is_same_v<T, Seeded>) {
            return static_cast<Symbol>(mix(s.seed, k) % static_cast<std::uint64_t>(m));
          } else {
            if (k == 0 || k > s.symbols.size())
              throw capacity_error("explicit free-symbol stream exhausted at index " + std::to_string(k));
            if (s.symbols[k - 1] >= m) throw argument_error("explicit free symbol outside alphabet");
            return s.symbols[k - 1];
          }
        },
        kind_);
  }

  const auto& kind() const { return kind_; }

private:
  template <typename T>
  explicit SymbolStream(T k) : kind_(std::move(k))
  {
  }

  // splitmix64 finalizer over (seed, index)
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t k)
  {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::variant<Constant, Seeded, Explicit> kind_ = Constant{};
};

/// Infinite repetition of a nonempty word.
struct PeriodicBase
{
  Word period;
};

/// A point of F_p: p leading zeros, then blocks of length p whose first and
/// last symbols are 1 and whose p-2 interior symbols come from `free`.
struct FpBase
{
  int p = 3;
  SymbolStream free;
};

/// A finite word; indexing past its end is a capacity error.
struct ExplicitBase
{
  Word word;
};

using BaseSource = std::variant<PeriodicBase, FpBase, ExplicitBase>;

/// Index of the free symbol at position j of an F_p point, or 0 when j is pinned.
inline std::uint64_t fp_free_index(int p, std::uint64_t j)
{
  const auto up = static_cast<std::uint64_t>(p);
  if (j <= up) return 0;
  const std::uint64_t block = (j - 1) / up; // >= 1
  const std::uint64_t r = (j - 1) % up;     // 0 .. p-1
  if (r == 0 || r == up - 1) return 0;
  return (block - 1) * (up - 2) + r;
}

/// Symbol at position j (1-based) of an F_p point.
inline Symbol fp_symbol(const FpBase& base, std::uint64_t j, int m)
{
  const auto up = static_cast<std::uint64_t>(base.p);
  if (j <= up) return 0;
  const std::uint64_t r = (j - 1) % up;
  if (r == 0 || r == up - 1) return 1;
  return base.free.at(fp_free_index(base.p, j), m);
}

inline Symbol base_symbol(const BaseSource& base, std::uint64_t j, int m)
{
  return std::visit(
      [&](const auto& b) -> Symbol {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PeriodicBase>) {
          return b.period.symbols()[(j - 1) % b.period.length()];
        } else if constexpr (std::is_same_v<T, FpBase>) {
          return fp_symbol(b, j, m);
        } else {
          if (j > b.word.length())
            throw capacity_error("explicit base word of length " + std::to_string(b.word.length()) +
                                 " exhausted at position " + std::to_string(j));
          return b.word.symbols()[j - 1];
        }
      },
      base);
}

/// Insertion of `word` so that its first symbol lands at `position` of the final sequence.
struct InsertionEvent
{
  BigInt position;
  Word word;
};

/// An infinite sequence given by a base source and a list of insertion events.
///
/// Event positions are final coordinates: event k occupies
/// [position_k, position_k + |word_k|) of the limit sequence, and positions not
/// covered by any event read the base at j minus the total length of earlier
/// events. Because events never overlap and appear in increasing order, the
/// sequence restricted to the first k events is exactly the k-th sequential
/// insertion stage, and stages agree below the next insertion point.
class LazySequence
{
public:
  LazySequence(Alphabet alphabet, BaseSource base, std::vector<InsertionEvent> events = {},
               std::uint64_t cap = kDefaultMaterializationCap)
      : alphabet_(alphabet), base_(std::move(base)), events_(std::move(events)), cap_(cap)
  {
    validate_base();
    BigInt previous_end = 1;
    BigInt total = 0;
    cumulative_.reserve(events_.size());
    for (std::size_t e = 0; e < events_.size(); ++e) {
      const auto& ev = events_[e];
      if (!(ev.word.alphabet() == alphabet_)) throw argument_error("insertion word alphabet mismatch");
      if (ev.word.empty()) throw argument_error("insertion word must be nonempty");
      if (ev.position < 1) throw argument_error("insertion position must be >= 1");
      if (ev.position < previous_end)
        throw argument_error("insertion event " + std::to_string(e + 1) + " at " + ev.position.str() +
                             " overlaps or precedes the previous event ending before " + previous_end.str());
      cumulative_.push_back(total);
      total += ev.word.length();
      previous_end = ev.position + ev.word.length();
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const BaseSource& base() const { return base_; }
  const std::vector<InsertionEvent>& events() const { return events_; }
  std::uint64_t cap() const { return cap_; }

  /// j-th symbol of the limit sequence.
  Symbol index(std::uint64_t j) const { return index_with_events(j, events_.size()); }

  /// j-th symbol of the stage that applies only the first `event_count` events.
  Symbol index_with_events(std::uint64_t j, std::size_t event_count) const
  {
    check_position(j);
    event_count = std::min(event_count, events_.size());
    // last event with position <= j among the first event_count
    const auto first = events_.begin();
    const auto last = first + static_cast<std::ptrdiff_t>(event_count);
    const auto it = std::upper_bound(first, last, j,
                                     [](std::uint64_t pos, const InsertionEvent& ev) { return BigInt(pos) < ev.position; });
    if (it == first) return base_symbol(base_, j, alphabet_.size());
    const auto e = static_cast<std::size_t>(std::distance(first, it)) - 1;
    const auto& ev = events_[e];
    const BigInt offset = BigInt(j) - ev.position; // >= 0
    if (offset < ev.word.length()) return ev.word.symbols()[offset.convert_to<std::size_t>()];
    const BigInt base_j = BigInt(j) - cumulative_[e] - ev.word.length();
    return base_symbol(base_, base_j.convert_to<std::uint64_t>(), alphabet_.size());
  }

  Word prefix(std::uint64_t length) const { return prefix_with_events(length, events_.size()); }

  Word prefix_with_events(std::uint64_t length, std::size_t event_count) const
  {
    if (length > cap_)
      throw capacity_error("prefix of length " + std::to_string(length) + " exceeds materialization cap " +
                           std::to_string(cap_));
    event_count = std::min(event_count, events_.size());
    std::vector<Symbol> out;
    out.reserve(length);
    std::uint64_t base_j = 1;
    std::size_t e = 0;
    while (out.size() < length) {
      std::uint64_t j = out.size() + 1;
      if (e < event_count && events_[e].position == j) {
        const auto& w = events_[e].word.symbols();
        for (std::size_t k = 0; k < w.size() && out.size() < length; ++k) out.push_back(w[k]);
        ++e;
        continue;
      }
      std::uint64_t run_end = length; // last position (inclusive) served from the base
      if (e < event_count && events_[e].position <= length) run_end = events_[e].position.convert_to<std::uint64_t>() - 1;
      for (; j <= run_end; ++j) out.push_back(base_symbol(base_, base_j++, alphabet_.size()));
    }
    return Word(alphabet_, std::move(out));
  }

  /// Same base, only the first `event_count` events.
  LazySequence with_events(std::size_t event_count) const
  {
    event_count = std::min(event_count, events_.size());
    return LazySequence(alphabet_, base_,
                        std::vector<InsertionEvent>(events_.begin(), events_.begin() + static_cast<std::ptrdiff_t>(event_count)),
                        cap_);
  }

  /// Base symbols among the first `length` positions, i.e. the prefix with every inserted range removed.
  Word strip_insertions(std::uint64_t length) const
  {
    const Word full = prefix(length);
    std::vector<Symbol> out;
    out.reserve(length);
    std::size_t e = 0;
    for (std::uint64_t j = 1; j <= length; ++j) {
      while (e < events_.size() && events_[e].position + events_[e].word.length() <= j) ++e;
      const bool inside = e < events_.size() && events_[e].position <= j;
      if (!inside) out.push_back(full.symbols()[j - 1]);
    }
    return Word(alphabet_, std::move(out));
  }

private:
  void check_position(std::uint64_t j) const
  {
    if (j == 0) throw argument_error("sequence positions are 1-based");
    if (j > cap_)
      throw capacity_error("position " + std::to_string(j) + " exceeds materialization cap " + std::to_string(cap_));
  }

  void validate_base() const
  {
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, PeriodicBase>) {
            if (b.period.empty()) throw argument_error("periodic base needs a nonempty period");
            if (!(b.period.alphabet() == alphabet_)) throw argument_error("periodic base alphabet mismatch");
          } else if constexpr (std::is_same_v<T, FpBase>) {
            if (b.p <= 2) throw argument_error("F_p base needs p > 2");
          } else {
            if (!(b.word.alphabet() == alphabet_)) throw argument_error("explicit base alphabet mismatch");
          }
        },
        base_);
  }

  Alphabet alphabet_;
  BaseSource base_;
  std::vector<InsertionEvent> events_;
  std::vector<BigInt> cumulative_; // total inserted length before event e
  std::uint64_t cap_;
};

} // namespace recurrencelab
