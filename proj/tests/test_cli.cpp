#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "recurrencelab/cli.hpp"

using namespace recurrencelab;

namespace
{

struct Run
{
  int code = -1;
  std::string out;
  std::string err;

  std::vector<json> lines() const
  {
    std::vector<json> v;
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line))
      if (!line.empty()) v.push_back(json::parse(line));
    return v;
  }

  json last() const { return lines().back(); }
};

Run run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_path(const std::string& name)
{
  return (std::filesystem::temp_directory_path() / ("recurrencelab_test_" + name)).string();
}

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Sets an environment variable for the lifetime of the guard.
struct EnvGuard
{
  std::string name;
  EnvGuard(std::string n, const std::string& value) : name(std::move(n)) { ::setenv(name.c_str(), value.c_str(), 1); }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

} // namespace

TEST(CliClassify, DimensionZeroBelowOne)
{
  const auto r = run({"classify", "--phi", "log(n)", "--alpha", "0.5", "--beta", "2"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = r.last();
  EXPECT_EQ(j["dimension"], 0);
  EXPECT_EQ(j["gamma"], 1.0);
  EXPECT_EQ(j["delta"], 1.0);
  EXPECT_TRUE(j["case"].is_null());
}

TEST(CliClassify, FullDimensionCarriesCase)
{
  const auto r = run({"classify", "--phi", "log(n)", "--alpha", "2", "--beta", "inf"});
  ASSERT_EQ(r.code, 0);
  const auto j = r.last();
  EXPECT_EQ(j["dimension"], 1);
  EXPECT_EQ(j["case"], "ii");
  EXPECT_EQ(run({"classify", "--phi", "log(n)", "--alpha", "inf", "--beta", "inf"}).last()["case"], "i");
  EXPECT_EQ(run({"classify", "--phi", "log(n)", "--alpha", "2", "--beta", "2"}).last()["case"], "v");
}

TEST(CliClassify, OscillatingRate)
{
  const auto r = run({"classify", "--phi-osc", "0.5,2", "--alpha", "2", "--beta", "2.5"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = r.last();
  EXPECT_EQ(j["dimension"], 1);
  EXPECT_EQ(j["gamma"], 2.0);
  EXPECT_EQ(j["delta"], 0.5);
  EXPECT_EQ(j["case"], "vi");
}

TEST(CliVerify, CaseVPasses)
{
  const auto r = run({"verify", "--phi", "log(n)", "--alpha", "2", "--beta", "2", "--horizon", "12", "--cap", "1000000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = r.lines();
  const auto& verdict = lines.back();
  EXPECT_EQ(verdict["verdict"], "PASS");
  EXPECT_EQ(verdict["mismatches"], 0);
  EXPECT_GT(verdict["checked"].get<std::size_t>(), 0u);
  EXPECT_EQ(lines.size(), verdict["checked"].get<std::size_t>() + 1);
  for (std::size_t k = 0; k + 1 < lines.size(); ++k) ASSERT_TRUE(lines[k]["ok"].get<bool>()) << lines[k].dump();
  EXPECT_NE(r.err.find("PASS"), std::string::npos);
}

TEST(CliVerify, ExactEqualitiesInsideTheCap)
{
  const auto r = run({"verify", "--phi", "log(n)", "--alpha", "1.2", "--beta", "1.2", "--cap", "1000000", "--report", "none"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto v = r.last();
  EXPECT_EQ(v["verdict"], "PASS");
  EXPECT_GT(v["exact_checked"].get<std::size_t>(), 1000u);
  EXPECT_EQ(r.lines().size(), 1u);
}

TEST(CliVerify, SplitRatesUseBracketStarts)
{
  const auto r = run({"verify", "--phi", "log(n)", "--alpha", "1", "--beta", "2", "--cap", "1000000", "--report", "none"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto v = r.last();
  EXPECT_NEAR(v["rates"][0]["estimate"].get<double>(), 1.0, 0.1);
  EXPECT_NEAR(v["rates"][1]["estimate"].get<double>(), 2.0, 0.2);
  EXPECT_LT(v["beta_at_terms"].get<double>(), 1.5);
}

TEST(CliVerify, FailingRatesGiveVerifyExitCode)
{
  const auto r = run({"verify", "--phi", "log(n)", "--alpha", "1", "--beta", "2", "--cap", "1000000", "--report", "none",
                      "--tol", "0.0001"});
  EXPECT_EQ(r.code, exit_verify_failed);
  const auto v = r.last();
  EXPECT_EQ(v["verdict"], "FAIL");
  EXPECT_EQ(v["mismatches"], 0);
  EXPECT_FALSE(v["failures"].empty());
}

TEST(CliVerify, DimensionZeroIsAGuardError)
{
  const auto r = run({"verify", "--phi", "log(n)", "--alpha", "0.5", "--beta", "0.5"});
  EXPECT_EQ(r.code, exit_guard);
  EXPECT_EQ(r.last()["error"], "guard");
}

TEST(CliDim, FpFour)
{
  const auto r = run({"dim", "--fp", "4", "--m", "2", "--depths", "40:800:40"});
  ASSERT_EQ(r.code, 0);
  const auto j = r.last();
  EXPECT_NEAR(j["estimate"].get<double>(), 0.5, 0.02);
  EXPECT_EQ(j["target"], 0.5);
  EXPECT_EQ(j["depths"], 20);
}

TEST(CliDim, BadDepths)
{
  EXPECT_EQ(run({"dim", "--fp", "4", "--depths", "40:800"}).code, exit_usage);
  EXPECT_EQ(run({"dim", "--fp", "4", "--depths", "a:b:c"}).code, exit_usage);
  EXPECT_EQ(run({"dim", "--fp", "2", "--depths", "1:10:1"}).code, exit_usage);
}

TEST(CliReturnTimes, InlineWord)
{
  const auto r = run({"return-times", "--word", "0110"});
  ASSERT_EQ(r.code, 0);
  const auto lines = r.lines();
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], (json{{"n", 1}, {"kind", "exact"}, {"value", 3}}));
  EXPECT_EQ(lines[1]["kind"], "lower_bound");
}

TEST(CliReturnTimes, FileWordAndRange)
{
  const auto path = temp_path("word.txt");
  {
    std::ofstream f(path);
    f << "0000\n0000\n";
  }
  const auto r = run({"return-times", "--word", path, "--from", "2", "--to", "3", "--prime"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto lines = r.lines();
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0]["n"], 2);
  EXPECT_EQ(lines[0]["value"], 2); // R'_n = n on a constant word
  EXPECT_EQ(lines[1]["value"], 3);
  std::filesystem::remove(path);
}

TEST(CliReturnTimes, Errors)
{
  EXPECT_EQ(run({"return-times", "--word", "0120", "--m", "2"}).code, exit_usage);
  EXPECT_EQ(run({"return-times", "--word", "0101", "--to", "9"}).code, exit_usage);
  EXPECT_EQ(run({"return-times"}).code, exit_usage);
}

TEST(CliErrors, UsageErrorsAreJson)
{
  for (const auto& args : std::vector<std::vector<std::string>>{{}, {"frobnicate"}, {"classify", "--alpha"}, {"dim", "--fp", "x"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, exit_usage);
    const auto j = r.last();
    EXPECT_EQ(j["error"], "usage");
    EXPECT_TRUE(j.contains("message"));
  }
  const auto bad_phi = run({"classify", "--phi", "log(n"});
  EXPECT_EQ(bad_phi.code, exit_usage);
  EXPECT_EQ(bad_phi.last()["error"], "parse");
  EXPECT_EQ(run({"classify", "--phi", "n", "--phi-osc", "0.5,2"}).code, exit_usage);
  EXPECT_EQ(run({"classify", "--alpha", "2", "--beta", "1"}).code, exit_usage);
}

TEST(CliErrors, HelpExitsCleanly)
{
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(CliCap, FlagBeatsEnvironmentBeatsDefault)
{
  using cli::resolve_cap;
  EXPECT_EQ(resolve_cap(std::nullopt), kDefaultMaterializationCap);
  {
    EnvGuard g(cli::kCapEnv, "5000");
    EXPECT_EQ(resolve_cap(std::nullopt), 5000u);
    EXPECT_EQ(resolve_cap(7000), 7000u);
    const auto r = run({"return-times", "--word", std::string(6000, '0')});
    EXPECT_EQ(r.code, exit_capacity);
    EXPECT_EQ(r.last()["error"], "capacity");
  }
  {
    EnvGuard g(cli::kCapEnv, "12x");
    EXPECT_THROW(resolve_cap(std::nullopt), argument_error);
  }
  EXPECT_THROW(resolve_cap(999), argument_error);
  EXPECT_EQ(run({"verify", "--cap", "10"}).code, exit_usage);
}

TEST(CliPlan, RoundTripsThroughJson)
{
  const auto path = temp_path("plan.json");
  const auto r = run({"plan", "--phi", "log(n)", "--alpha", "2", "--beta", "2", "--horizon", "6", "--out", path});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto plan = plan_from_json(json::parse(slurp(path)));
  const auto direct = plan_full_dimension(log_n_phi(), 2.0, 2.0, 6);
  ASSERT_EQ(plan.terms.size(), direct.terms.size());
  for (std::size_t k = 0; k < plan.terms.size(); ++k) {
    EXPECT_EQ(plan.terms[k].n, direct.terms[k].n);
    EXPECT_EQ(plan.terms[k].ell, direct.terms[k].ell);
  }
  EXPECT_EQ(plan.case_tag, CaseTag::v);
  EXPECT_EQ(to_json(plan), to_json(direct));
  std::filesystem::remove(path);
}

TEST(CliPlan, DeterministicOutput)
{
  const std::vector<std::string> args{"plan", "--phi-osc", "0.5,2", "--alpha", "2", "--beta", "2.5", "--horizon", "8"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(CliBuild, PlanFileToWordAndSequence)
{
  const auto plan_path = temp_path("build_plan.json");
  const auto word_path = temp_path("build_word.txt");
  const auto seq_path = temp_path("build_seq.json");
  const auto plan = make_plan(3, 2, {4, 8, 16}, {64, 256, 1024});
  {
    std::ofstream f(plan_path);
    f << to_json(plan).dump();
  }
  const auto r = run({"build", "--plan", plan_path, "--seed", "7", "--out", word_path, "--sequence-out", seq_path});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = r.last();
  EXPECT_EQ(j["length"], 1024 + 16 + 3);
  EXPECT_EQ(j["events"], 3);

  const auto seq = apply_insertions(FpBase{3, SymbolStream::seeded(7)}, plan);
  std::string word = slurp(word_path);
  word.erase(word.find_last_not_of('\n') + 1);
  EXPECT_EQ(word, seq.prefix(1043).str());
  const auto back = lazy_sequence_from_json(json::parse(slurp(seq_path)));
  EXPECT_EQ(back.prefix(1043), seq.prefix(1043));

  const auto rt = run({"return-times", "--word", word_path, "--from", "5", "--to", "16"});
  for (const auto& line : rt.lines()) {
    const auto n = line["n"].get<std::uint64_t>();
    EXPECT_EQ(BigInt(line["value"].get<std::uint64_t>()), predicted_return_time(plan, n).value) << n;
  }
  for (const auto& p : {plan_path, word_path, seq_path}) std::filesystem::remove(p);
}

TEST(CliBuild, LengthAboveCapIsCapacityError)
{
  const auto r = run({"build", "--phi", "log(n)", "--alpha", "2", "--beta", "2", "--length", "5000", "--cap", "1000"});
  EXPECT_EQ(r.code, exit_capacity);
}

TEST(CliBuild, InlineWordWhenNoOutput)
{
  const auto r = run({"build", "--phi", "log(n)", "--alpha", "2", "--beta", "2", "--horizon", "3", "--length", "30"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = r.last();
  EXPECT_EQ(j["word"].get<std::string>().size(), 30u);
  EXPECT_TRUE(fp_membership(Word::parse(j["word"].get<std::string>().substr(0, 9), Alphabet(2)), 3));
}

TEST(CliRates, WordTrajectory)
{
  const auto r = run({"rates", "--word", std::string(50, '0'), "--phi", "log(n)", "--from", "2", "--to", "49"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto lines = r.lines();
  ASSERT_EQ(lines.size(), 48u);
  for (const auto& l : lines) EXPECT_EQ(l["R"], "1");
  EXPECT_EQ(json::parse(r.err)["alpha_hat"], 0.0);
}

TEST(CliRates, PlanTrajectoryWithBracketStarts)
{
  const auto path = temp_path("rates_plan.json");
  ASSERT_EQ(run({"plan", "--phi", "log(n)", "--alpha", "1", "--beta", "2", "--horizon", "20", "--out", path}).code, 0);
  const auto plain = run({"rates", "--plan", path, "--phi", "log(n)"});
  const auto starts = run({"rates", "--plan", path, "--phi", "log(n)", "--bracket-starts"});
  ASSERT_EQ(plain.code, 0);
  const auto terms = plan_from_json(json::parse(slurp(path))).terms.size();
  ASSERT_GE(terms, 8u);
  EXPECT_EQ(plain.lines().size(), terms);
  EXPECT_EQ(starts.lines().size(), 2 * terms - 1);
  EXPECT_NEAR(json::parse(starts.err)["beta_hat"].get<double>(), 2.0, 0.2);
  EXPECT_EQ(run({"rates", "--phi", "log(n)"}).code, exit_usage);
  std::filesystem::remove(path);
}

TEST(CliWitnesses, ConstantWord)
{
  const auto r = run({"witnesses", "--word", std::string(300, '0'), "--alpha", "0.5", "--eps", "0.1"});
  ASSERT_EQ(r.code, 0);
  const auto lines = r.lines();
  ASSERT_EQ(lines.size(), 298u);
  EXPECT_EQ(lines.front(), (json{{"n", 2}, {"R", 1}}));
  EXPECT_EQ(run({"witnesses", "--word", "0101", "--alpha", "0.95"}).code, exit_usage);
}

TEST(CliPhi, TableFile)
{
  const auto path = temp_path("phi_table.txt");
  {
    std::ofstream f(path);
    f << "0.5 0.7 1.1 1.4 1.6\n";
  }
  const auto r = run({"classify", "--phi-table", path, "--table-extension", "constant", "--alpha", "1", "--beta", "1"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = r.last();
  EXPECT_EQ(j["provenance"], "estimated");
  EXPECT_LT(j["gamma"].get<double>(), 0.2); // bounded phi: phi(n)/log n -> 0
  {
    std::ofstream f(path);
    f << "[0.5, -1]";
  }
  EXPECT_EQ(run({"classify", "--phi-table", path}).code, exit_usage);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"classify", "--phi-table", path}).code, exit_usage);
}

TEST(JsonIo, PhiRoundTrip)
{
  for (const auto& phi : {log_n_phi(), power_log_phi(2.0, 0.0, 1.5), parse_phi("log(n) + n^0.5"),
                          table_phi({1.0, 2.0, 3.0}, TableExtension::constant), osc_log_phi(0.5, 2.0)}) {
    const auto back = phi_from_json(to_json(phi));
    EXPECT_EQ(to_json(back), to_json(phi));
    for (std::uint64_t n : {1u, 2u, 10u, 1000u}) EXPECT_DOUBLE_EQ(eval_phi(back, n), eval_phi(phi, n));
  }
  EXPECT_THROW(phi_from_json(json{{"kind", "nope"}}), argument_error);
  EXPECT_THROW(phi_from_json(json{{"kind", "powerlog"}}), argument_error);
}

TEST(JsonIo, ExtRealAndPlanErrors)
{
  EXPECT_EQ(to_json(ExtReal::infinity()), "inf");
  EXPECT_TRUE(ext_real_from_json("inf").is_inf());
  EXPECT_EQ(ext_real_from_json(2.5).value(), 2.5);
  EXPECT_THROW(ext_real_from_json(json::array()), argument_error);
  EXPECT_THROW(plan_from_json(json{{"p", 3}}), argument_error);
  EXPECT_THROW(plan_from_json(json{{"terms", {{{"n", "x"}, {"ell", "4"}}}}}), argument_error);
  const auto big = plan_from_json(json{{"terms", {{{"n", "123456789012345678901234567890"}, {"ell", 7}}}}});
  EXPECT_EQ(big.terms.front().n.str(), "123456789012345678901234567890");
}
