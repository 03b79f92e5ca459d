#include <gtest/gtest.h>

#include <random>

#include "recurrencelab/cantor_builder.hpp"
#include "recurrencelab/return_time.hpp"

using namespace recurrencelab;

namespace
{

const Alphabet bin(2);

/// Sequential splice: x^(k) = x^(k-1)[1..ell_k-1] w_k x^(k-1)[ell_k..].
/// With `skip_short` unset, terms with n_k <= p are inserted as well.
std::vector<Symbol> naive_splice(const InsertionPlan& plan, std::vector<Symbol> x, bool skip_short = true)
{
  const auto p = static_cast<std::uint64_t>(plan.p);
  for (const auto& term : plan.terms) {
    const auto ell = to_u64(term.ell);
    const auto nk = to_u64(term.n);
    if (ell - 1 <= p || (skip_short && nk <= p)) continue;
    std::vector<Symbol> w{1};
    w.insert(w.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nk));
    w.push_back(static_cast<Symbol>((x[nk] + 1) % plan.m));
    w.push_back(1);
    x.insert(x.begin() + static_cast<std::ptrdiff_t>(ell - 1), w.begin(), w.end());
  }
  return x;
}

std::vector<Symbol> to_vec(const Word& w) { return {w.symbols().begin(), w.symbols().end()}; }

InsertionPlan small_plan()
{
  return make_plan(3, 2, {4, 8, 16, 32}, {64, 256, 1024, 4096});
}

} // namespace

TEST(FpPrefix, BlockLayout)
{
  EXPECT_EQ(build_fp_prefix(3, SymbolStream::constant(0), 9, 2).str(), "000101101");
  EXPECT_EQ(build_fp_prefix(4, SymbolStream::constant(1), 8, 2).str(), "00001111");
  EXPECT_THROW(build_fp_prefix(2, SymbolStream::constant(0), 8, 2), argument_error);
}

TEST(FpPrefix, ProducedWordsAreMembers)
{
  for (int p : {3, 4, 5, 7})
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto w = build_fp_prefix(p, SymbolStream::seeded(seed), 500, 3);
      EXPECT_TRUE(fp_membership(w, p)) << "p=" << p << " seed=" << seed;
    }
}

TEST(FpMembership, Examples)
{
  EXPECT_TRUE(fp_membership(Word::parse("000101101", bin), 3));
  EXPECT_FALSE(fp_membership(Word::parse("001", bin), 3));
}

TEST(FpMembership, MutationAtPinnedPositionIsRejected)
{
  std::mt19937_64 rng(7);
  for (int p : {3, 4, 6}) {
    const auto w = build_fp_prefix(p, SymbolStream::seeded(11), 200, 2);
    for (int trial = 0; trial < 50; ++trial) {
      // pinned positions: 1..p, and the first and last symbol of each later block
      std::vector<std::uint64_t> pinned;
      for (std::uint64_t j = 1; j <= 200; ++j)
        if (j <= static_cast<std::uint64_t>(p) || (j - 1) % p == 0 || (j - 1) % p == static_cast<std::uint64_t>(p - 1))
          pinned.push_back(j);
      const auto j = pinned[rng() % pinned.size()];
      auto s = to_vec(w);
      s[j - 1] ^= 1;
      EXPECT_FALSE(fp_membership(Word(bin, s), p)) << "p=" << p << " j=" << j;
    }
  }
}

TEST(FpCylinderCount, Examples)
{
  EXPECT_EQ(fp_cylinder_count(4, 4, 2), 1);
  EXPECT_EQ(fp_cylinder_count(4, 12, 2), 16);
}

TEST(FpCylinderCount, MatchesEnumeration)
{
  for (int p : {3, 4, 5})
    for (std::uint64_t n = 1; n <= 16; ++n) {
      std::uint64_t count = 0;
      std::vector<Symbol> s(n);
      for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        for (std::uint64_t b = 0; b < n; ++b) s[b] = static_cast<Symbol>((mask >> b) & 1u);
        if (fp_membership(Word(bin, s), p)) ++count;
      }
      EXPECT_EQ(fp_cylinder_count(p, n, 2), count) << "p=" << p << " n=" << n;
    }
}

TEST(FpCylinderCount, GrowthExponent)
{
  for (int p : {3, 4, 5}) {
    const std::uint64_t n = 3000;
    const double e = fp_log_cylinder_count(p, n, 2) / (static_cast<double>(n) * std::log(2.0));
    EXPECT_NEAR(e, (p - 2.0) / p, 0.01);
  }
}

TEST(InsertionWord, Examples)
{
  EXPECT_EQ(make_insertion_word(Word::parse("0010", bin), 3).str(), "100111");
  EXPECT_EQ(make_insertion_word(Word::parse("0120", Alphabet(3)), 2).str(), "10101");
  EXPECT_THROW(make_insertion_word(Word::parse("001", bin), 3), argument_error);
}

TEST(InsertionWord, LengthAndFlippedSymbol)
{
  const auto x = build_fp_prefix(4, SymbolStream::seeded(5), 100, 3);
  for (std::uint64_t nk = 1; nk < 99; ++nk) {
    const auto w = make_insertion_word(x.prefix(nk + 1), nk);
    ASSERT_EQ(w.length(), nk + 3);
    for (std::uint64_t j = 1; j <= nk; ++j) EXPECT_EQ(w.at(j + 1), x.at(j));
    EXPECT_NE(w.at(nk + 2), x.at(nk + 1));
    EXPECT_EQ(w.at(1), 1);
    EXPECT_EQ(w.at(nk + 3), 1);
  }
}

TEST(PlanConditions, QuarticEll)
{
  std::vector<BigInt> n, ell;
  for (int i = 1; i <= 30; ++i) {
    n.emplace_back(i);
    ell.emplace_back(BigInt(i) * i * i * i);
  }
  const auto r = check_plan_conditions(make_plan(3, 2, n, ell), 0.01);
  EXPECT_TRUE(r.condition_i_ok());
  EXPECT_TRUE(r.increasing_ok);
  EXPECT_TRUE(r.eventually_nonincreasing);
  EXPECT_NEAR(r.final_ratio, 30.0 * 33.0 / 810000.0, 1e-12);
  EXPECT_TRUE(r.ok());
}

TEST(PlanConditions, ConstantEllFailsAtFirstTerm)
{
  const auto r = check_plan_conditions(make_plan(3, 2, {1, 2, 3}, {10, 10, 10}), 0.01);
  ASSERT_FALSE(r.condition_i_ok());
  EXPECT_EQ(r.condition_i_failures.front(), 1u);
  EXPECT_FALSE(r.ok());
}

TEST(PlanConditions, RisingTailIsNotEventuallyNonincreasing)
{
  const auto r = check_plan_conditions(make_plan(3, 2, {1, 2, 3, 4}, {100, 200, 300, 310}), 1.0);
  EXPECT_FALSE(r.eventually_nonincreasing);
  EXPECT_FALSE(r.condition_ii_ok);
}

TEST(PredictedReturnTime, BracketLookup)
{
  const auto plan = make_plan(3, 2, {4, 8, 16}, {64, 256, 1024});
  EXPECT_EQ(predicted_return_time(plan, 5).value, 256);
  EXPECT_EQ(predicted_return_time(plan, 8).value, 256);
  EXPECT_EQ(predicted_return_time(plan, 9).value, 1024);
  EXPECT_EQ(predicted_return_time(plan, 4).value, 64);
  const auto p = predicted_return_time(plan, 5);
  ASSERT_TRUE(p.threshold);
  EXPECT_EQ(*p.threshold, 4);
  EXPECT_TRUE(p.certified);
  EXPECT_FALSE(predicted_return_time(plan, 3).certified);
  EXPECT_THROW(predicted_return_time(plan, 17), argument_error);
}

TEST(ApplyInsertions, EmptyPlanKeepsBase)
{
  const FpBase base{3, SymbolStream::constant(0)};
  InsertionPlan plan;
  const auto seq = apply_insertions(base, plan);
  EXPECT_EQ(seq.prefix(60), build_fp_prefix(3, SymbolStream::constant(0), 60, 2));
}

TEST(ApplyInsertions, MatchesNaiveSplice)
{
  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    const FpBase base{3, SymbolStream::seeded(seed)};
    const auto plan = small_plan();
    const auto seq = apply_insertions(base, plan);
    const auto naive = naive_splice(plan, to_vec(build_fp_prefix(3, base.free, 6000, 2)));
    const auto got = seq.prefix(5000);
    for (std::uint64_t j = 0; j < 5000; ++j) ASSERT_EQ(got.symbols()[j], naive[j]) << "seed " << seed << " j " << j + 1;
  }
}

TEST(ApplyInsertions, LaterStagesKeepEarlierPrefix)
{
  const FpBase base{3, SymbolStream::seeded(9)};
  const auto one = apply_insertions(base, make_plan(3, 2, {4}, {64}));
  const auto two = apply_insertions(base, make_plan(3, 2, {4, 8}, {64, 256}));
  EXPECT_EQ(two.prefix(255), one.prefix(255));
}

TEST(ApplyInsertions, SmallEllIsSkipped)
{
  const FpBase base{5, SymbolStream::constant(0)};
  const auto seq = apply_insertions(base, make_plan(5, 2, {1, 2, 9}, {2, 6, 20}));
  ASSERT_EQ(seq.events().size(), 1u);
  EXPECT_EQ(seq.events().front().position, 20);
}

TEST(ApplyInsertions, ShortTermIsSkipped)
{
  // n_1 = p: w_1 = 1 000 0 1 holds 0000, so "0001..." could return at ell_1 + 1.
  const auto plan = make_plan(3, 2, {3, 7, 9}, {404, 2981, 8104});
  const FpBase base{3, SymbolStream::constant(0)};
  const auto seq = apply_insertions(base, plan);
  ASSERT_EQ(seq.events().size(), 2u);
  EXPECT_EQ(seq.events().front().position, 2981);

  const auto literal = naive_splice(plan, to_vec(build_fp_prefix(3, base.free, 9000, 2)), false);
  const Word lw(bin, {literal.begin(), literal.begin() + 8000});
  EXPECT_EQ(return_time_naive(lw, 6).value, 405u); // the literal splice breaks R_6 = ell_2
  const auto w = seq.prefix(8200);
  for (std::uint64_t n = 4; n <= 9; ++n) {
    const auto r = return_time_naive(w, n);
    ASSERT_TRUE(r.is_exact()) << n;
    EXPECT_EQ(BigInt(r.value), predicted_return_time(plan, n).value) << n;
  }
}

TEST(ApplyInsertions, RejectsSpacingViolation)
{
  const FpBase base{3, SymbolStream::constant(0)};
  EXPECT_THROW(apply_insertions(base, make_plan(3, 2, {4, 8}, {64, 66})), plan_error);
  EXPECT_THROW(apply_insertions(base, make_plan(3, 2, {4, 3}, {64, 256})), plan_error);
}

TEST(ApplyInsertions, StrippingRecoversBase)
{
  const FpBase base{4, SymbolStream::seeded(21)};
  const auto plan = make_plan(4, 2, {5, 9, 20}, {40, 200, 700});
  const auto seq = apply_insertions(base, plan);
  const auto stripped = seq.strip_insertions(1500);
  const auto ref = build_fp_prefix(4, base.free, stripped.length(), 2);
  EXPECT_EQ(stripped, ref);
}

TEST(ApplyInsertions, ReturnTimesMatchPredictionOnCertifiedRange)
{
  const std::vector<InsertionPlan> plans{
      small_plan(),
      make_plan(3, 2, {5, 10, 20, 40}, {30, 120, 500, 2000}),
      make_plan(4, 3, {5, 7, 30, 31}, {50, 90, 300, 400}),
      make_plan(5, 2, {6, 12, 24}, {100, 400, 1600}),
  };
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const auto& plan = plans[k];
    const FpBase base{plan.p, SymbolStream::seeded(100 + k)};
    const auto seq = apply_insertions(base, plan);
    const auto L = to_u64(plan.terms.back().ell + plan.terms.back().n + 3);
    const auto w = seq.prefix(L);
    const auto start = certification_start(plan);
    ASSERT_TRUE(start);
    const auto lo = to_u64(plan.terms[*start - 1].n) + 1;
    const auto hi = to_u64(plan.terms.back().n);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const auto r = return_time_naive(w, n);
      const auto pred = predicted_return_time(plan, n);
      ASSERT_TRUE(pred.certified);
      ASSERT_TRUE(r.is_exact()) << "plan " << k << " n " << n;
      EXPECT_EQ(BigInt(r.value), pred.value) << "plan " << k << " n " << n;
    }
  }
}
