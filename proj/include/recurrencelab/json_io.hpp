#pragma once

// JSON forms of extended reals, rate functions, plans and lazy sequences.

#include <json.hpp>

#include <string>

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/cantor_builder.hpp"
#include "recurrencelab/errors.hpp"
#include "recurrencelab/ext_real.hpp"
#include "recurrencelab/phi_spec.hpp"
#include "recurrencelab/return_time.hpp"
#include "recurrencelab/shift_core.hpp"

namespace recurrencelab
{

using json = nlohmann::json;

inline json to_json(const ExtReal& x)
{
  if (x.is_inf()) return "inf";
  return x.value();
}

inline ExtReal ext_real_from_json(const json& j)
{
  if (j.is_string()) return ExtReal::parse(j.get<std::string>());
  if (j.is_number()) return ExtReal(j.get<double>());
  throw argument_error("extended real must be a number or \"inf\"");
}

// ---------------------------------------------------------------- PhiSpec

inline json to_json(const PhiSpec& phi)
{
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLog>) {
          return {{"kind", "powerlog"}, {"c", f.c}, {"a", f.a}, {"b", f.b}};
        } else if constexpr (std::is_same_v<T, ExprPhi>) {
          return {{"kind", "expr"}, {"source", f.source}};
        } else if constexpr (std::is_same_v<T, TablePhi>) {
          return {{"kind", "table"},
                  {"values", f.values},
                  {"extension", f.extension == TableExtension::linear ? "linear" : "constant"}};
        } else {
          return {{"kind", "osclog"}, {"delta", f.delta}, {"gamma", to_json(f.gamma)}, {"log_boundaries", f.log_boundaries}};
        }
      },
      phi.form);
}

inline PhiSpec phi_from_json(const json& j)
{
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "powerlog") return power_log_phi(j.at("c").get<double>(), j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "expr") {
      const auto src = j.at("source").get<std::string>();
      PhiSpec phi{ExprPhi{src, parse_expr(src)}};
      return phi;
    }
    if (kind == "table") {
      const auto ext = j.value("extension", std::string("linear"));
      if (ext != "linear" && ext != "constant") throw argument_error("unknown table extension '" + ext + "'");
      return table_phi(j.at("values").get<std::vector<double>>(),
                       ext == "linear" ? TableExtension::linear : TableExtension::constant);
    }
    if (kind == "osclog")
      return osc_log_phi(j.at("delta").get<double>(), ext_real_from_json(j.at("gamma")),
                         j.value("log_boundaries", std::vector<double>{}));
    throw argument_error("unknown phi kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw argument_error(std::string("malformed phi JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- plans

inline json to_json(const InsertionPlan& plan)
{
  json terms = json::array();
  for (const auto& t : plan.terms) {
    json jt{{"i", t.i}, {"n", t.n.str()}, {"ell", t.ell.str()}};
    if (t.adjusted) jt["adjusted"] = true;
    if (t.rho) jt["rho"] = *t.rho;
    terms.push_back(std::move(jt));
  }
  json j{{"p", plan.p}, {"m", plan.m}, {"case_tag", case_name(plan.case_tag)}, {"terms", std::move(terms)}};
  j["truncated"] = plan.truncated;
  if (plan.truncated) j["truncation_reason"] = plan.truncation_reason;
  return j;
}

inline BigInt bigint_from_json(const json& j)
{
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v < 0) throw argument_error("negative integer in plan");
    return BigInt(v);
  }
  throw argument_error("integer must be a decimal string or a number");
}

inline InsertionPlan plan_from_json(const json& j)
{
  try {
    InsertionPlan plan;
    plan.p = j.value("p", 3);
    plan.m = j.value("m", 2);
    plan.case_tag = parse_case_name(j.value("case_tag", std::string("manual")));
    plan.truncated = j.value("truncated", false);
    plan.truncation_reason = j.value("truncation_reason", std::string());
    std::size_t idx = 0;
    for (const auto& jt : j.at("terms")) {
      PlanTerm t;
      t.i = jt.value("i", idx + 1);
      t.n = bigint_from_json(jt.at("n"));
      t.ell = bigint_from_json(jt.at("ell"));
      t.adjusted = jt.value("adjusted", false);
      if (jt.contains("rho")) t.rho = jt.at("rho").get<double>();
      plan.terms.push_back(std::move(t));
      ++idx;
    }
    return plan;
  } catch (const json::exception& e) {
    throw argument_error(std::string("malformed plan JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- sequences

inline json to_json(const SymbolStream& s)
{
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SymbolStream::Constant>) return {{"kind", "constant"}, {"symbol", k.symbol}};
        else if constexpr (std::is_same_v<T, SymbolStream::Seeded>) return {{"kind", "seeded"}, {"seed", k.seed}};
        else {
          std::string digits;
          for (const auto c : k.symbols) digits.push_back(detail::kDigits[c]);
          return {{"kind", "explicit"}, {"symbols", digits}};
        }
      },
      s.kind());
}

inline SymbolStream symbol_stream_from_json(const json& j, const Alphabet& alphabet)
{
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return SymbolStream::constant(j.at("symbol").get<Symbol>());
  if (kind == "seeded") return SymbolStream::seeded(j.at("seed").get<std::uint64_t>());
  if (kind == "explicit") {
    const auto w = Word::parse(j.at("symbols").get<std::string>(), alphabet);
    return SymbolStream::explicit_symbols({w.symbols().begin(), w.symbols().end()});
  }
  throw argument_error("unknown free-symbol stream kind '" + kind + "'");
}

inline json to_json(const LazySequence& seq)
{
  json base = std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PeriodicBase>) return {{"kind", "periodic"}, {"period", b.period.str()}};
        else if constexpr (std::is_same_v<T, FpBase>) return {{"kind", "fp"}, {"p", b.p}, {"free", to_json(b.free)}};
        else return {{"kind", "explicit"}, {"word", b.word.str()}};
      },
      seq.base());
  json events = json::array();
  for (const auto& e : seq.events()) events.push_back({{"pos", e.position.str()}, {"word", e.word.str()}});
  return {{"m", seq.alphabet().size()}, {"base", std::move(base)}, {"events", std::move(events)}};
}

inline LazySequence lazy_sequence_from_json(const json& j, std::uint64_t cap = kDefaultMaterializationCap)
{
  try {
    const Alphabet alphabet(j.at("m").get<int>());
    const auto& jb = j.at("base");
    const auto kind = jb.at("kind").get<std::string>();
    const auto base = [&]() -> BaseSource {
      if (kind == "periodic") return PeriodicBase{Word::parse(jb.at("period").get<std::string>(), alphabet)};
      if (kind == "fp") return FpBase{jb.at("p").get<int>(), symbol_stream_from_json(jb.at("free"), alphabet)};
      if (kind == "explicit") return ExplicitBase{Word::parse(jb.at("word").get<std::string>(), alphabet)};
      throw argument_error("unknown base kind '" + kind + "'");
    }();
    std::vector<InsertionEvent> events;
    for (const auto& je : j.at("events"))
      events.push_back({bigint_from_json(je.at("pos")), Word::parse(je.at("word").get<std::string>(), alphabet)});
    return LazySequence(alphabet, base, std::move(events), cap);
  } catch (const json::exception& e) {
    throw argument_error(std::string("malformed sequence JSON: ") + e.what());
  }
}

inline json to_json(const ReturnTimeResult& r, std::size_t n)
{
  return {{"n", n}, {"kind", r.kind_name()}, {"value", r.value}};
}

} // namespace recurrencelab
