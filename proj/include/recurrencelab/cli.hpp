#pragma once

// Command-line front end. Every subcommand writes JSON lines to `out`; human
// summaries go to `err`. Failures print {"error", "message"} on `out` and
// return a distinct exit code.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "recurrencelab/json_io.hpp"
#include "recurrencelab/plan_engine.hpp"
#include "recurrencelab/rate_dim_analysis.hpp"
#include "recurrencelab/verify.hpp"

namespace recurrencelab
{

enum ExitCode : int
{
  exit_ok = 0,
  exit_failure = 1,
  exit_usage = 2,
  exit_capacity = 3,
  exit_guard = 4,
  exit_verify_failed = 5,
  exit_search = 6,
};

namespace cli
{

inline constexpr const char* kCapEnv = "RECURRENCELAB_CAP";
inline constexpr std::uint64_t kMinCap = 1000;

struct PhiOptions
{
  std::string expr;
  std::string table_file;
  std::string table_extension = "linear";
  std::string osc; // "delta,gamma"

  void add_to(CLI::App& app)
  {
    app.add_option("--phi", expr, "rate function expression in n, e.g. \"log(n)\"");
    app.add_option("--phi-table", table_file, "file with phi(1), phi(2), ... (JSON array or whitespace separated)");
    app.add_option("--table-extension", table_extension, "linear or constant extension past the table")
        ->check(CLI::IsMember({"linear", "constant"}));
    app.add_option("--phi-osc", osc, "oscillating log rate \"delta,gamma\"");
  }

  bool given() const { return !expr.empty() || !table_file.empty() || !osc.empty(); }

  PhiSpec resolve() const
  {
    const int count = !expr.empty() + !table_file.empty() + !osc.empty();
    if (count > 1) throw argument_error("give at most one of --phi, --phi-table, --phi-osc");
    if (!table_file.empty()) return load_table();
    if (!osc.empty()) {
      const auto comma = osc.find(',');
      if (comma == std::string::npos) throw argument_error("--phi-osc expects \"delta,gamma\"");
      const auto delta = ExtReal::parse(osc.substr(0, comma));
      if (delta.is_inf()) throw argument_error("OscLog delta must be finite");
      return osc_log_phi(delta.value(), ExtReal::parse(osc.substr(comma + 1)));
    }
    return parse_phi(expr.empty() ? "log(n)" : expr);
  }

private:
  PhiSpec load_table() const
  {
    std::ifstream in(table_file);
    if (!in) throw argument_error("cannot read phi table '" + table_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto text = ss.str();
    std::vector<double> values;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      try {
        values = json::parse(text).get<std::vector<double>>();
      } catch (const json::exception& e) {
        throw argument_error(std::string("malformed phi table: ") + e.what());
      }
    } else {
      std::istringstream is(text);
      std::string tok;
      while (is >> tok) values.push_back(ExtReal::parse(tok).value());
    }
    return table_phi(std::move(values), table_extension == "constant" ? TableExtension::constant : TableExtension::linear);
  }
};

struct TargetOptions
{
  PhiOptions phi;
  std::string alpha = "1";
  std::string beta = "1";
  std::uint64_t gd_horizon = 1'000'000;

  void add_to(CLI::App& app)
  {
    phi.add_to(app);
    app.add_option("--alpha", alpha, "lower rate (number or inf)");
    app.add_option("--beta", beta, "upper rate (number or inf)");
    app.add_option("--gd-horizon", gd_horizon, "scan horizon when gamma and delta are estimated")->check(CLI::PositiveNumber);
  }

  ProfileTarget target() const
  {
    return make_target(phi.resolve(), ExtReal::parse(alpha), ExtReal::parse(beta), gd_horizon);
  }
};

struct PlanOptions
{
  TargetOptions target;
  std::size_t horizon = 12;
  int p = 3;
  int m = 2;
  std::size_t digit_cap = kDefaultDigitCap;
  std::uint64_t probe_cap = SearchCaps{}.probe_cap;

  void add_to(CLI::App& app)
  {
    target.add_to(app);
    app.add_option("--horizon", horizon, "number of plan terms")->check(CLI::PositiveNumber);
    app.add_option("--p", p, "block length of the Cantor set F_p (>= 3)")->check(CLI::Range(3, 1 << 20));
    app.add_option("--m", m, "alphabet size")->check(CLI::Range(2, 36));
    app.add_option("--digit-cap", digit_cap, "largest decimal length of a plan integer")->check(CLI::PositiveNumber);
    app.add_option("--probe-cap", probe_cap, "probes per witness search")->check(CLI::PositiveNumber);
  }

  PlanCaps caps() const { return {{probe_cap, digit_cap}, p, m}; }

  InsertionPlan build() const { return plan_full_dimension(target.target(), horizon, caps()); }
};

/// --cap, then $RECURRENCELAB_CAP, then the library default.
inline std::uint64_t resolve_cap(const std::optional<std::uint64_t>& flag)
{
  std::uint64_t cap = kDefaultMaterializationCap;
  if (flag) {
    cap = *flag;
  } else if (const char* env = std::getenv(kCapEnv); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      cap = v;
    } catch (const std::exception&) {
      throw argument_error(std::string(kCapEnv) + " is not an integer: '" + env + "'");
    }
  }
  if (cap < kMinCap) throw argument_error("materialization cap must be >= " + std::to_string(kMinCap));
  return cap;
}

inline std::string read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw argument_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path);
  if (!out) throw argument_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw argument_error("write to '" + path + "' failed");
}

/// A word given inline as digits, or the path of a file holding them.
/// Whitespace is ignored; the alphabet size defaults to the largest digit + 1.
inline Word load_word(const std::string& spec, std::optional<int> m)
{
  std::error_code ec;
  std::string text = std::filesystem::is_regular_file(spec, ec) ? read_file(spec) : spec;
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
  if (text.empty()) throw argument_error("word is empty");
  if (!m) {
    int top = 0;
    for (const char c : text) top = std::max(top, detail::digit_value(c));
    m = std::max(2, top + 1);
  }
  return Word::parse(text, Alphabet(*m));
}

inline std::string provenance_name(Provenance p) { return p == Provenance::analytic ? "analytic" : "estimated"; }

inline json opt_ext(const std::optional<ExtReal>& x) { return x ? to_json(*x) : json(nullptr); }

// ---------------------------------------------------------------- subcommands

inline int run_classify(const TargetOptions& o, std::ostream& out)
{
  const auto c = classify(o.phi.resolve(), ExtReal::parse(o.alpha), ExtReal::parse(o.beta), o.gd_horizon);
  json j{{"dimension", c.dimension},
         {"gamma", to_json(c.gamma)},
         {"delta", to_json(c.delta)},
         {"provenance", provenance_name(c.provenance)},
         {"A", opt_ext(c.A)},
         {"B", opt_ext(c.B)},
         {"case", c.case_tag ? json(case_name(*c.case_tag)) : json(nullptr)}};
  if (!c.note.empty()) j["note"] = c.note;
  out << j.dump() << '\n';
  return exit_ok;
}

inline int run_plan(const PlanOptions& o, const std::string& out_path, std::ostream& out, std::ostream& err)
{
  const auto plan = o.build();
  const auto text = to_json(plan).dump();
  if (out_path.empty()) out << text << '\n';
  else write_file(out_path, text + "\n");
  err << "plan: case " << case_name(plan.case_tag) << ", " << plan.terms.size() << " terms"
      << (plan.truncated ? " (truncated: " + plan.truncation_reason + ")" : std::string()) << '\n';
  return exit_ok;
}

struct BuildOptions
{
  PlanOptions plan;
  std::string plan_file;
  std::optional<std::uint64_t> length;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> cap;
  std::string out_path;
  std::string sequence_out;
};

inline InsertionPlan load_or_build_plan(const std::string& plan_file, const PlanOptions& o)
{
  if (plan_file.empty()) return o.build();
  try {
    return plan_from_json(json::parse(read_file(plan_file)));
  } catch (const json::parse_error& e) {
    throw argument_error(std::string("plan file is not JSON: ") + e.what());
  }
}

inline int run_build(const BuildOptions& o, std::ostream& out, std::ostream& err)
{
  const auto cap = resolve_cap(o.cap);
  const auto plan = load_or_build_plan(o.plan_file, o.plan);
  if (plan.terms.empty()) throw capacity_error("plan has no terms");
  std::uint64_t L = 0;
  if (o.length) {
    L = *o.length;
  } else {
    const BigInt needed = plan.terms.back().ell + plan.terms.back().n + 3;
    L = needed < cap ? to_u64(needed) : cap;
  }
  if (L < 1) throw argument_error("length must be >= 1");
  if (L > cap) throw capacity_error("length " + std::to_string(L) + " exceeds the materialization cap " + std::to_string(cap));
  const BaseSource base = FpBase{plan.p, o.seed ? SymbolStream::seeded(*o.seed) : SymbolStream::constant(0)};
  const auto seq = apply_insertions(base, plan, L, cap);
  const auto word = seq.prefix(L);
  if (!o.sequence_out.empty()) write_file(o.sequence_out, to_json(seq).dump() + "\n");
  json j{{"length", L}, {"events", seq.events().size()}};
  if (o.out_path.empty()) {
    j["word"] = word.str();
  } else {
    write_file(o.out_path, word.str() + "\n");
    j["out"] = o.out_path;
  }
  out << j.dump() << '\n';
  err << "build: " << L << " symbols, " << seq.events().size() << " insertions\n";
  return exit_ok;
}

struct RangeOptions
{
  std::uint64_t from = 1;
  std::optional<std::uint64_t> to;

  void add_to(CLI::App& app)
  {
    app.add_option("--from", from, "first n")->check(CLI::PositiveNumber);
    app.add_option("--to", to, "last n (default: word length)");
  }

  std::pair<std::uint64_t, std::uint64_t> resolve(std::uint64_t length) const
  {
    const auto hi = to.value_or(length);
    if (hi > length) throw argument_error("--to exceeds the word length " + std::to_string(length));
    if (from > hi) throw argument_error("empty n range");
    return {from, hi};
  }
};

struct WordOptions
{
  std::string word;
  std::optional<int> m;

  void add_to(CLI::App& app)
  {
    app.add_option("--word", word, "digits, or a file holding them")->required();
    app.add_option("--m", m, "alphabet size (default: largest digit + 1)")->check(CLI::Range(2, 36));
  }

  Word load() const { return load_word(word, m); }
};

inline int run_return_times(const WordOptions& wo, const RangeOptions& ro, bool prime, std::optional<std::uint64_t> cap_flag,
                            std::ostream& out)
{
  const auto cap = resolve_cap(cap_flag);
  const auto w = wo.load();
  if (w.length() > cap) throw capacity_error("word length exceeds the materialization cap");
  const auto [lo, hi] = ro.resolve(w.length());
  const auto r = prime ? return_times_prime_all(w) : return_times_all(w);
  for (auto n = lo; n <= hi; ++n) out << to_json(r[n - 1], n).dump() << '\n';
  return exit_ok;
}

inline void print_trajectory(const RateTrajectory& t, std::ostream& out)
{
  for (const auto& e : t.entries)
    out << json{{"n", e.n.str()}, {"R", e.R.str()}, {"ratio", e.ratio}, {"kind", e.exact ? "exact" : "lower_bound"}}.dump()
        << '\n';
}

struct RatesOptions
{
  PhiOptions phi;
  std::string word;
  std::optional<int> m;
  std::string plan_file;
  RangeOptions range;
  bool bracket_starts = false;
  double tail = 0.5;
  std::optional<std::uint64_t> cap;
};

inline int run_rates(const RatesOptions& o, std::ostream& out, std::ostream& err)
{
  if (o.word.empty() == o.plan_file.empty()) throw argument_error("give exactly one of --word and --plan");
  const auto phi = o.phi.resolve();
  RateTrajectory t;
  if (!o.word.empty()) {
    const auto cap = resolve_cap(o.cap);
    const auto w = load_word(o.word, o.m);
    if (w.length() > cap) throw capacity_error("word length exceeds the materialization cap");
    const auto [lo, hi] = o.range.resolve(w.length());
    t = rate_trajectory(w, phi, lo, hi);
  } else {
    t = rate_trajectory(load_or_build_plan(o.plan_file, {}), phi, o.bracket_starts);
  }
  print_trajectory(t, out);
  const auto ex = running_extremes(t, o.tail);
  err << json{{"alpha_hat", ex.alpha_hat}, {"beta_hat", ex.beta_hat}, {"window", ex.window}}.dump() << '\n';
  return exit_ok;
}

inline int run_witnesses(const WordOptions& wo, double alpha, double eps, std::optional<std::uint64_t> cap_flag,
                         std::ostream& out, std::ostream& err)
{
  const auto cap = resolve_cap(cap_flag);
  const auto w = wo.load();
  if (w.length() > cap) throw capacity_error("word length exceeds the materialization cap");
  const auto r = return_times_all(w);
  const auto hits = close_return_witnesses(w, alpha, eps);
  for (const auto n : hits) out << json{{"n", n}, {"R", r[n - 1].value}}.dump() << '\n';
  err << "witnesses: " << hits.size() << " of " << w.length() << " prefixes\n";
  return exit_ok;
}

inline std::vector<std::uint64_t> parse_depths(const std::string& spec)
{
  std::vector<std::uint64_t> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw argument_error("--depths expects lo:hi:step, got '" + spec + "'");
    parts.push_back(v);
  }
  if (parts.size() != 3) throw argument_error("--depths expects lo:hi:step, got '" + spec + "'");
  if (parts[0] < 1 || parts[2] < 1) throw argument_error("depths and step must be >= 1");
  return depth_range(parts[0], parts[1], parts[2]);
}

inline int run_dim(int p, int m, const std::string& depths_spec, std::ostream& out)
{
  check_p(p);
  const auto depths = parse_depths(depths_spec);
  const auto d = fp_box_dimension(p, m, depths);
  out << json{{"estimate", d.slope}, {"target", (p - 2.0) / p}, {"depths", d.depths}, {"degenerate", d.degenerate}}.dump()
      << '\n';
  return exit_ok;
}

struct VerifyOptions
{
  PlanOptions plan;
  std::optional<std::uint64_t> cap;
  std::optional<std::uint64_t> seed;
  double eps = 0.01;
  double tol = 0.1;
  double tail = 0.5;
  std::string report = "all";
};

inline int run_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err)
{
  VerifyConfig cfg;
  cfg.phi = o.plan.target.phi.resolve();
  cfg.alpha = ExtReal::parse(o.plan.target.alpha);
  cfg.beta = ExtReal::parse(o.plan.target.beta);
  cfg.gd_horizon = o.plan.target.gd_horizon;
  cfg.horizon = o.plan.horizon;
  cfg.cap = resolve_cap(o.cap);
  cfg.caps = o.plan.caps();
  cfg.seed = o.seed;
  cfg.eps = o.eps;
  cfg.tol = o.tol;
  cfg.tail = o.tail;
  const auto rep = verify_profile(cfg);

  if (o.report != "none")
    for (const auto& c : rep.checks) {
      if (o.report == "mismatches" && c.ok) continue;
      out << json{{"n", c.n},
                  {"term", c.term},
                  {"predicted", c.predicted.str()},
                  {"observed", c.observed.value},
                  {"kind", c.observed.kind_name()},
                  {"expect_exact", c.expect_exact},
                  {"ok", c.ok}}
                 .dump()
          << '\n';
    }

  json rates = json::array();
  for (const auto& rc : rep.rate_checks)
    rates.push_back({{"name", rc.name}, {"target", to_json(rc.target)}, {"estimate", rc.estimate}, {"checked", rc.checked}, {"ok", rc.ok}});
  out << json{{"verdict", rep.pass ? "PASS" : "FAIL"},
              {"case", case_name(rep.plan.case_tag)},
              {"terms", rep.plan.terms.size()},
              {"truncated", rep.plan.truncated},
              {"length", rep.length},
              {"events", rep.events},
              {"checked", rep.checks.size()},
              {"exact_checked", rep.exact_checks},
              {"mismatches", rep.mismatches},
              {"conditions_ok", rep.conditions.ok()},
              {"final_density_ratio", rep.conditions.final_ratio},
              {"beta_at_terms", rep.rates.beta_hat},
              {"beta_at_starts", rep.beta_at_starts},
              {"rates", std::move(rates)},
              {"failures", rep.failures}}
             .dump()
      << '\n';
  err << "verify: " << (rep.pass ? "PASS" : "FAIL") << ", " << rep.checks.size() << " n checked (" << rep.exact_checks
      << " exact), " << rep.mismatches << " mismatches, alpha_hat " << rep.rate_checks[0].estimate << ", beta_hat "
      << rep.rate_checks[1].estimate << '\n';
  for (const auto& f : rep.failures) err << "  " << f << '\n';
  return rep.pass ? exit_ok : exit_verify_failed;
}

inline void print_error(std::ostream& out, const std::string& kind, const std::string& message)
{
  out << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

} // namespace cli

/// Runs one command line (without the program name). Returns the exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
  using namespace cli;
  CLI::App app{"Return times, recurrence-rate profiles and full-dimension constructions on shift spaces", "recurrencelab"};
  app.require_subcommand(1);

  TargetOptions classify_o;
  auto* classify_cmd = app.add_subcommand("classify", "dimension verdict and construction case for a target");
  classify_o.add_to(*classify_cmd);

  PlanOptions plan_o;
  std::string plan_out;
  auto* plan_cmd = app.add_subcommand("plan", "emit an insertion plan as JSON");
  plan_o.add_to(*plan_cmd);
  plan_cmd->add_option("--out", plan_out, "write the plan to this file");

  BuildOptions build_o;
  auto* build_cmd = app.add_subcommand("build", "materialize a prefix of the constructed point");
  build_o.plan.add_to(*build_cmd);
  build_cmd->add_option("--plan", build_o.plan_file, "plan JSON file (otherwise planned from the target flags)");
  build_cmd->add_option("--length", build_o.length, "prefix length (default: through the last insertion)")->check(CLI::PositiveNumber);
  build_cmd->add_option("--seed", build_o.seed, "seed for the free F_p symbols (default: all zero)");
  build_cmd->add_option("--cap", build_o.cap, "materialization cap");
  build_cmd->add_option("--out", build_o.out_path, "write the word to this file");
  build_cmd->add_option("--sequence-out", build_o.sequence_out, "write the lazy sequence description as JSON");

  WordOptions rt_word;
  RangeOptions rt_range;
  bool rt_prime = false;
  std::optional<std::uint64_t> rt_cap;
  auto* rt_cmd = app.add_subcommand("return-times", "first return times of every prefix of a word");
  rt_word.add_to(*rt_cmd);
  rt_range.add_to(*rt_cmd);
  rt_cmd->add_flag("--prime", rt_prime, "use the strict variant R'_n");
  rt_cmd->add_option("--cap", rt_cap, "materialization cap");

  RatesOptions rates_o;
  auto* rates_cmd = app.add_subcommand("rates", "trajectory of log R_n / phi(n)");
  rates_o.phi.add_to(*rates_cmd);
  rates_cmd->add_option("--word", rates_o.word, "digits, or a file holding them");
  rates_cmd->add_option("--m", rates_o.m, "alphabet size")->check(CLI::Range(2, 36));
  rates_cmd->add_option("--plan", rates_o.plan_file, "plan JSON file; ratios at the plan terms");
  rates_o.range.add_to(*rates_cmd);
  rates_cmd->add_flag("--bracket-starts", rates_o.bracket_starts, "also report n = n_{i-1} + 1 for plans");
  rates_cmd->add_option("--tail", rates_o.tail, "tail fraction for the inf/sup estimates")->check(CLI::Range(0.0, 1.0));
  rates_cmd->add_option("--cap", rates_o.cap, "materialization cap");

  WordOptions wit_word;
  double wit_alpha = 0.5;
  double wit_eps = 0.1;
  std::optional<std::uint64_t> wit_cap;
  auto* wit_cmd = app.add_subcommand("witnesses", "prefixes with R_n < n^(alpha + eps)");
  wit_word.add_to(*wit_cmd);
  wit_cmd->add_option("--alpha", wit_alpha, "exponent alpha (alpha + eps < 1)");
  wit_cmd->add_option("--eps", wit_eps, "slack eps > 0");
  wit_cmd->add_option("--cap", wit_cap, "materialization cap");

  int dim_p = 3;
  int dim_m = 2;
  std::string dim_depths;
  auto* dim_cmd = app.add_subcommand("dim", "box-counting dimension of F_p");
  dim_cmd->add_option("--fp", dim_p, "block length p of F_p")->required();
  dim_cmd->add_option("--m", dim_m, "alphabet size")->check(CLI::Range(2, 36));
  dim_cmd->add_option("--depths", dim_depths, "lo:hi:step")->required();

  VerifyOptions ver_o;
  auto* ver_cmd = app.add_subcommand("verify", "plan, materialize and check return times and rates");
  ver_o.plan.add_to(*ver_cmd);
  ver_cmd->add_option("--cap", ver_o.cap, "materialization cap");
  ver_cmd->add_option("--seed", ver_o.seed, "seed for the free F_p symbols (default: all zero)");
  ver_cmd->add_option("--eps", ver_o.eps, "threshold for the final density ratio");
  ver_cmd->add_option("--tol", ver_o.tol, "relative tolerance for rate estimates");
  ver_cmd->add_option("--tail", ver_o.tail, "tail fraction for rate estimates");
  ver_cmd->add_option("--report", ver_o.report, "per-n lines: all, mismatches or none")
      ->check(CLI::IsMember({"all", "mismatches", "none"}));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    print_error(out, "usage", e.what());
    err << app.help();
    return exit_usage;
  }

  try {
    if (*classify_cmd) return run_classify(classify_o, out);
    if (*plan_cmd) return run_plan(plan_o, plan_out, out, err);
    if (*build_cmd) return run_build(build_o, out, err);
    if (*rt_cmd) return run_return_times(rt_word, rt_range, rt_prime, rt_cap, out);
    if (*rates_cmd) return run_rates(rates_o, out, err);
    if (*wit_cmd) return run_witnesses(wit_word, wit_alpha, wit_eps, wit_cap, out, err);
    if (*dim_cmd) return run_dim(dim_p, dim_m, dim_depths, out);
    if (*ver_cmd) return run_verify(ver_o, out, err);
  } catch (const argument_error& e) {
    print_error(out, "argument", e.what());
    return exit_usage;
  } catch (const parse_error& e) {
    print_error(out, "parse", e.what());
    return exit_usage;
  } catch (const capacity_error& e) {
    print_error(out, "capacity", e.what());
    return exit_capacity;
  } catch (const guard_error& e) {
    print_error(out, "guard", e.what());
    return exit_guard;
  } catch (const search_error& e) {
    print_error(out, "search", e.what());
    return exit_search;
  } catch (const plan_error& e) {
    print_error(out, "plan", e.what());
    return exit_failure;
  } catch (const std::exception& e) {
    print_error(out, "internal", e.what());
    return exit_failure;
  }
  return exit_usage;
}

} // namespace recurrencelab
