#include "eidforge/generate.hpp"

#include <json.hpp>

#include <sstream>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/serialize.hpp"

namespace eidforge {

namespace {

using json = nlohmann::ordered_json;

bool same(const Expr& a, const Expr& b) { return a == b || is_zero(a - b); }

// General solution of y0'' - l y0 = 0 usable at a resonant l, where the
// requested seed form may not apply.
Expr general_seed(const FamilySpec& s) {
  if (is_zero(s.l)) return s.c1 + s.c2 * symbols::x();
  if (s.l.is_number()) return seed_solution(sgn(s.l.number_value()) < 0 ? SeedForm::Trig : SeedForm::Hyp, s.l, s.c1, s.c2);
  return seed_solution(s.seed_form, s.l, s.c1, s.c2);
}

ExprText text_of(const Expr& e) { return {to_prefix(e), to_latex(e)}; }

Expr bracket_of(const GeneratedProblem& p) { return p.ode.display ? *p.ode.display : normalize(-p.ode.coeff); }

bool bare(const Expr& e) {
  if (e.is_symbol()) return true;
  return e.is_number() && e.number_value() >= 0;
}

json text_json(const ExprText& t) { return {{"prefix", t.prefix}, {"latex", t.latex}}; }

ExprText text_from(const json& j) { return {j.at("prefix").get<std::string>(), j.at("latex").get<std::string>()}; }

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "text") return OutputFormat::Text;
  if (name == "latex") return OutputFormat::Latex;
  if (name == "json") return OutputFormat::Json;
  throw ValidationError("unknown format '" + std::string(name) + "'");
}

GeneratedProblem generate(const GenerateRequest& req) {
  const FamilySpec& s = req.spec;
  validate(s);
  NormalODE ode = potential(s);
  bool resonant = is_resonant(s);
  Expr seed = resonant ? general_seed(s) : seed_solution(s.seed_form, s.l, s.c1, s.c2);

  GeneratedProblem gp = chain(NormalODE(-s.l, -s.l), chain_steps(s), seed);
  if (!same(gp.ode.coeff, ode.coeff)) throw Error("chain coefficient disagrees with the family potential");
  gp.ode = ode;
  gp.resonant = resonant;
  gp.constants = {s.c1, s.c2};

  if (resonant) {
    gp.solution = degenerate_solution(s);
    return gp;
  }
  Expr closed = family_solution(s);
  if (!same(closed, family_solution_loop(s))) throw Error("closed and loop forms of the solution disagree");
  if (!same(closed, gp.solution)) throw Error("closed form disagrees with the EID chain");
  gp.solution = closed;
  return gp;
}

std::pair<Expr, Expr> basis(const GeneratedProblem& problem) {
  const auto& [c1, c2] = problem.constants;
  auto pick = [&](int u, int v) {
    Substitution sub;
    if (c1.is_symbol()) sub[c1.name()] = Expr(u);
    if (c2.is_symbol()) sub[c2.name()] = Expr(v);
    return substitute(problem.solution, sub);
  };
  return {pick(1, 0), pick(0, 1)};
}

namespace {

Point bindings_for(const std::vector<Expr>& exprs, unsigned seed, int l_sign) {
  Point b = sample_bindings(parameters_of(exprs), seed);
  if (auto it = b.find("l"); it != b.end() && l_sign < 0) it->second = -it->second;
  return b;
}

}  // namespace

VerificationReport verify_problem(const GeneratedProblem& problem, const VerifyOptions& opts, int l_sign) {
  Point b = bindings_for({problem.ode.coeff, problem.solution}, opts.seed, l_sign);
  return residual(problem.ode, problem.solution, b, opts);
}

ProblemRecord make_record(const GeneratedProblem& problem, const std::optional<GenerateRequest>& req,
                          const std::optional<VerificationReport>& report) {
  ProblemRecord r;
  r.resonant = problem.resonant;
  r.equation = text_of(bracket_of(problem));
  r.solution = text_of(problem.solution);
  for (const auto& st : problem.trace)
    r.trace.push_back({to_prefix(st.eigenfunction), to_prefix(st.eigenvalue), to_prefix(st.log_derivative),
                       to_prefix(st.new_coeff), st.invertible});
  if (req) {
    const FamilySpec& s = req->spec;
    r.family = to_string(s.kind);
    r.n = s.n;
    r.params = {{"a", to_prefix(s.a)}, {"b", to_prefix(s.b)}, {"m", to_prefix(s.m)}, {"l", to_prefix(s.l)}};
    r.seed_form = to_string(s.seed_form);
    r.l_sign = s.l.is_number() ? (sgn(s.l.number_value()) < 0 ? -1 : 1) : (s.l_sign < 0 ? -1 : 1);
    if (req->output_form == OutputForm::Chain && !problem.resonant) {
      IteratedForm it = iterated_form(s);
      r.operator_form = OperatorText{it.to_text(), it.to_latex()};
      r.seed = text_of(problem.seed_solution);
    }
  } else {
    r.family = "chain";
    r.n = static_cast<unsigned>(problem.trace.size());
  }
  if (report) {
    r.verification = VerificationSummary{report->max_residual, static_cast<int>(report->per_point.size()),
                                         report->window.lo,    report->window.hi,
                                         report->tolerance,    report->passed};
  }
  return r;
}

std::string to_json(const ProblemRecord& r) {
  json j;
  j["version"] = r.version;
  j["family"] = r.family;
  j["n"] = r.n;
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["seed_form"] = r.seed_form;
  j["l_sign"] = r.l_sign;
  j["resonant"] = r.resonant;
  j["equation"] = text_json(r.equation);
  j["solution"] = text_json(r.solution);
  if (r.operator_form) j["operator"] = {{"text", r.operator_form->text}, {"latex", r.operator_form->latex}};
  if (r.seed) j["seed"] = text_json(*r.seed);
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"eigenfunction", t.eigenfunction},
                     {"eigenvalue", t.eigenvalue},
                     {"log_derivative", t.log_derivative},
                     {"new_coeff", t.new_coeff},
                     {"invertible", t.invertible}});
  j["trace"] = trace;
  if (r.verification) {
    const auto& v = *r.verification;
    j["verification"] = {{"max_residual", v.max_residual},
                         {"points", v.points},
                         {"window", {v.lo, v.hi}},
                         {"tolerance", v.tolerance},
                         {"passed", v.passed}};
  }
  return j.dump(2) + "\n";
}

ProblemRecord record_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  try {
    ProblemRecord r;
    r.version = j.at("version").get<std::string>();
    if (r.version != kRecordVersion) throw ParseError("unsupported record version '" + r.version + "'", 0);
    r.family = j.at("family").get<std::string>();
    r.n = j.at("n").get<unsigned>();
    for (const auto& [k, v] : j.at("params").items()) r.params.emplace_back(k, v.get<std::string>());
    r.seed_form = j.value("seed_form", std::string{});
    r.l_sign = j.value("l_sign", 1);
    r.resonant = j.at("resonant").get<bool>();
    r.equation = text_from(j.at("equation"));
    r.solution = text_from(j.at("solution"));
    if (j.contains("operator"))
      r.operator_form = OperatorText{j["operator"].at("text").get<std::string>(), j["operator"].at("latex").get<std::string>()};
    if (j.contains("seed")) r.seed = text_from(j["seed"]);
    for (const auto& t : j.at("trace"))
      r.trace.push_back({t.at("eigenfunction").get<std::string>(), t.at("eigenvalue").get<std::string>(),
                         t.at("log_derivative").get<std::string>(), t.at("new_coeff").get<std::string>(),
                         t.at("invertible").get<bool>()});
    if (j.contains("verification")) {
      const auto& v = j["verification"];
      r.verification = VerificationSummary{v.at("max_residual").get<double>(), v.at("points").get<int>(),
                                           v.at("window").at(0).get<double>(), v.at("window").at(1).get<double>(),
                                           v.at("tolerance").get<double>(),    v.at("passed").get<bool>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad record: ") + e.what(), 0);
  }
}

std::pair<Expr, Expr> record_exprs(const ProblemRecord& record) {
  return {parse_prefix(record.equation.prefix), parse_prefix(record.solution.prefix)};
}

VerificationReport verify_record(const ProblemRecord& record, const VerifyOptions& opts) {
  auto [bracket, y] = record_exprs(record);
  NormalODE ode(normalize(-bracket));
  Point b = bindings_for({ode.coeff, y}, opts.seed, record.l_sign);
  return residual(ode, y, b, opts);
}

std::string emit(const ProblemRecord& r, OutputFormat format) {
  if (format == OutputFormat::Json) return to_json(r);
  std::string y = r.trace.empty() ? "y0" : "y";
  auto [bracket, sol] = record_exprs(r);
  std::ostringstream out;
  if (format == OutputFormat::Text) {
    std::string e = to_text(bracket);
    if (!bare(bracket)) e = "(" + e + ")";
    out << y << "'' - " << e << " " << y << " = 0\n";
    if (r.operator_form && r.seed)
      out << y << " = " << r.operator_form->text << " (" << to_text(parse_prefix(r.seed->prefix)) << ")\n";
    else
      out << y << " = " << to_text(sol) << "\n";
  } else {
    std::string yl = r.trace.empty() ? "y_{0}" : "y";
    std::string e = r.equation.latex;
    if (!bare(bracket)) e = "\\left(" + e + "\\right)";
    out << yl << "'' - " << e << " " << yl << " = 0\n";
    if (r.operator_form && r.seed)
      out << yl << " = " << r.operator_form->latex << " \\left(" << r.seed->latex << "\\right)\n";
    else
      out << yl << " = " << r.solution.latex << "\n";
  }
  if (r.verification) {
    const auto& v = *r.verification;
    std::ostringstream line;
    line.precision(3);
    line << (v.passed ? "verified" : "FAILED") << ": max residual " << v.max_residual << " at " << v.points
         << " points on (" << v.lo << ", " << v.hi << ")";
    out << (format == OutputFormat::Latex ? "% " : "# ") << line.str() << "\n";
  }
  return out.str();
}

std::string emit(const GeneratedProblem& problem, OutputFormat format) { return emit(make_record(problem), format); }

}  // namespace eidforge
