#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "eidforge/calculus.hpp"
#include "eidforge/errors.hpp"
#include "eidforge/generate.hpp"
#include "eidforge/serialize.hpp"

using namespace eidforge;

namespace {

constexpr int kUsage = 2;

struct Options {
  std::string family = "hyperbolic";
  unsigned n = 1;
  std::string a = "1", b = "0", m = "1", l = "l";
  std::string seed = "expon";
  std::string c1 = "c1", c2 = "c2";
  std::string format = "text";
  std::string form = "expanded";
  std::string output;
  std::string input;
  std::vector<double> window;
  double tolerance = 1e-8;
  unsigned point_seed = 0;
  bool no_verify = false;
};

// Integers, p/q, decimals, identifiers, or prefix form.
Expr parse_value(const std::string& s) {
  if (s.empty()) throw ValidationError("empty value");
  if (s.front() == '(') return parse_prefix(s);
  if (std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_') {
    for (char c : s)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') throw ValidationError("bad value '" + s + "'");
    return s == "x" ? symbols::x() : Expr::parameter(s);
  }
  try {
    mpq_class q;
    if (auto dot = s.find('.'); dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, s.size() - dot - 1);
      q = mpq_class(mpz_class(digits), den);
    } else {
      q = mpq_class(s);
    }
    q.canonicalize();
    return Expr::number(q);
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad value '" + s + "'");
  }
}

VerifyOptions verify_options(const Options& o) {
  VerifyOptions v;
  v.tolerance = o.tolerance;
  v.seed = o.point_seed;
  if (!o.window.empty()) {
    if (o.window.size() != 2 || !(o.window[0] < o.window[1])) throw ValidationError("--window needs lo < hi");
    v.window = {o.window[0], o.window[1]};
  }
  return v;
}

void write_out(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw ValidationError("cannot write " + o.output);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

FamilySpec spec_from(const Options& o) {
  FamilySpec s;
  s.kind = parse_family(o.family);
  s.n = o.n;
  s.a = parse_value(o.a);
  s.b = parse_value(o.b);
  s.m = parse_value(o.m);
  s.l = parse_value(o.l);
  s.seed_form = parse_seed_form(o.seed);
  s.c1 = parse_value(o.c1);
  s.c2 = parse_value(o.c2);
  s.l_sign = s.seed_form == SeedForm::Trig ? -1 : 1;
  return s;
}

int run_generate(const Options& o) {
  GenerateRequest req{spec_from(o), o.form == "chain" ? OutputForm::Chain : OutputForm::Expanded};
  OutputFormat fmt = parse_format(o.format);
  GeneratedProblem p = generate(req);
  std::optional<VerificationReport> rep;
  if (!o.no_verify) rep = verify_problem(p, verify_options(o), req.spec.l_sign);
  write_out(o, emit(make_record(p, req, rep), fmt));
  return rep && !rep->passed ? 1 : 0;
}

// {"coeff": E, "spectral": E, "seed_solution": E, "steps": [{"eigenfunction": E, "eigenvalue": E}]}
// with every E in prefix form. A bare list is taken as the steps over y'' = 0.
int run_chain(const Options& o) {
  if (o.input.empty()) throw ValidationError("chain needs --input");
  OutputFormat fmt = parse_format(o.format);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(o.input));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad chain file: ") + e.what());
  }
  auto field = [&](const char* key, const char* fallback) {
    return parse_prefix(j.is_object() && j.contains(key) ? j[key].get<std::string>() : std::string(fallback));
  };
  const nlohmann::json& list = j.is_array() ? j : j.at("steps");
  std::vector<std::pair<Expr, Expr>> steps;
  for (const auto& s : list) {
    if (s.is_array())
      steps.emplace_back(parse_prefix(s.at(0).get<std::string>()), parse_prefix(s.at(1).get<std::string>()));
    else
      steps.emplace_back(parse_prefix(s.at("eigenfunction").get<std::string>()),
                         parse_prefix(s.at("eigenvalue").get<std::string>()));
  }
  NormalODE ode(field("coeff", "0"), field("spectral", "0"));
  GeneratedProblem p = chain(ode, steps, field("seed_solution", "0"));
  std::optional<VerificationReport> rep;
  if (!o.no_verify && !p.solution.is_zero()) rep = verify_problem(p, verify_options(o));
  write_out(o, emit(make_record(p, std::nullopt, rep), fmt));
  return rep && !rep->passed ? 1 : 0;
}

int run_verify(const Options& o) {
  if (o.input.empty()) throw ValidationError("verify needs --input");
  ProblemRecord r = record_from_json(read_file(o.input));
  VerificationReport rep = verify_record(r, verify_options(o));
  std::ostringstream out;
  out << std::setprecision(3) << (rep.passed ? "PASS" : "FAIL") << " max residual " << rep.max_residual << " over "
      << rep.per_point.size() << " points on (" << rep.window.lo << ", " << rep.window.hi << "), tolerance "
      << rep.tolerance << "\n";
  write_out(o, out.str());
  return rep.passed ? 0 : 1;
}

int run_identities(const Options& o) {
  FamilySpec base = spec_from(o);
  const Expr x = symbols::x();
  const std::vector<std::pair<std::string, Expr>> tests{{"exp(x)", exp(x)}, {"sin(x)", sin(x)}, {"x^2", pow(x, 2)}};
  constexpr double tol = 1e-9;
  Point bindings = sample_bindings(parameters_of({base.a, base.b, base.m}), o.point_seed);
  std::ostringstream out;
  out << std::setprecision(3);
  bool ok = true;
  for (unsigned n = 0; n <= o.n; ++n) {
    FamilySpec s = base;
    s.n = n;
    Window w = find_window({base_eigenfunction(s).ytilde0, pow(base_eigenfunction(s).ytilde0, -1)}, bindings,
                           verify_options(o).window);
    std::vector<double> pts = sample_points(w, 10, o.point_seed);
    for (auto form : {IdentityForm::WithD, IdentityForm::WithoutD}) {
      if (form == IdentityForm::WithoutD && n == 0) continue;
      for (const auto& [name, f] : tests) {
        double r = identity_residual(s, f, pts, bindings, form);
        bool pass = r < tol;
        ok = ok && pass;
        out << (pass ? "PASS" : "FAIL") << " n=" << n << (form == IdentityForm::WithD ? " with-D" : " without-D")
            << " f=" << name << " residual " << r << "\n";
      }
    }
  }
  write_out(o, out.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exactly solvable second-order ODEs by EID transformations"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "text|latex|json")->check(CLI::IsMember({"text", "latex", "json"}));
    sub->add_option("--output", o.output, "write to this file instead of stdout");
    sub->add_option("--window", o.window, "preferred sampling window: lo hi")->expected(2)->delimiter(',');
    sub->add_option("--tolerance", o.tolerance, "residual tolerance");
    sub->add_option("--point-seed", o.point_seed, "seed for sample points and parameter draws");
  };
  auto family = [&](CLI::App* sub) {
    sub->add_option("--family", o.family, "rational|exponential|hyperbolic|trigonometric (lin|expon|hyp|trig)");
    sub->add_option("--n", o.n, "chain length n");
    sub->add_option("--a", o.a, "family parameter a, number or symbol");
    sub->add_option("--b", o.b, "family parameter b, number or symbol");
    sub->add_option("--m", o.m, "exponent rate m (exponential and trigonometric families)");
    sub->add_option("--l", o.l, "spectral parameter, number or symbol");
    sub->add_option("--seed", o.seed, "seed solution form: expon|hyp|trig");
  };

  auto* gen = app.add_subcommand("generate", "generate a family member and its general solution");
  family(gen);
  common(gen);
  gen->add_option("--c1", o.c1, "name or value of the first constant");
  gen->add_option("--c2", o.c2, "name or value of the second constant");
  gen->add_option("--form", o.form, "expanded|chain")->check(CLI::IsMember({"expanded", "chain"}));
  gen->add_flag("--no-verify", o.no_verify, "skip the residual check");

  auto* ch = app.add_subcommand("chain", "run EID steps read from a JSON file");
  ch->add_option("--input", o.input, "chain description")->required();
  common(ch);
  ch->add_flag("--no-verify", o.no_verify, "skip the residual check");

  auto* ver = app.add_subcommand("verify", "re-check a saved problem record");
  ver->add_option("--input", o.input, "problem record (JSON)")->required();
  common(ver);

  auto* ids = app.add_subcommand("identities", "check the operational identities for n = 0..N");
  family(ids);
  common(ids);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return run_generate(o);
    if (*ch) return run_chain(o);
    if (*ver) return run_verify(o);
    if (*ids) return run_identities(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
