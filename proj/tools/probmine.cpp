// probmine: command-line workbench for the content-logic toolkit.
//
// Exit codes: 0 success/PASS, 1 FAIL (with a counterexample witness),
// 2 usage or input parse errors.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "probmine/expand.hpp"
#include "probmine/gen.hpp"
#include "probmine/interp.hpp"
#include "probmine/modulus.hpp"
#include "probmine/parser.hpp"
#include "probmine/printer.hpp"
#include "probmine/prob.hpp"
#include "probmine/verify.hpp"

using namespace probmine;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FormulaPtr parse_or_die(const std::string& text) { return parse_formula(text); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

LoadedModel load_with_bounds(const std::string& path, std::uint64_t nat,
                             const std::string& fun) {
  LoadedModel lm = load_model_file(path);
  if (nat != static_cast<std::uint64_t>(-1)) lm.bounds.nat_bound = nat;
  if (!fun.empty()) {
    auto x = fun.find('x');
    if (x == std::string::npos) throw UsageError("--fun expects DxR, got " + fun);
    lm.bounds.fun_dom = std::stoull(fun.substr(0, x));
    lm.bounds.fun_ran = std::stoull(fun.substr(x + 1));
  }
  lm.bounds.grid = model_grid(lm.space, lm.bounds);
  return lm;
}

int emit_report(const verify::SuiteReport& r, const std::string& model_tag) {
  if (r.pass) {
    std::cout << "PASS suite=" << r.suite << " cases=" << r.cases;
    if (!model_tag.empty()) std::cout << " model=" << model_tag;
    std::cout << "\n";
    return 0;
  }
  for (const auto& line : r.failures) std::cout << line << "\n";
  return 1;
}

ModulusTable parse_modulus_arg(const std::string& expr, const std::string& table) {
  if (!expr.empty() && !table.empty())
    throw UsageError("give either --expr or --table, not both");
  if (!expr.empty()) return ModulusTable::from_expr(parse_modulus_expr(expr));
  if (!table.empty()) {
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& row : split(table, ';')) {
      std::vector<std::uint64_t> r;
      std::istringstream ss(row);
      std::uint64_t v;
      while (ss >> v) r.push_back(v);
      rows.push_back(std::move(r));
    }
    return ModulusTable::from_table(std::move(rows));
  }
  throw UsageError("one of --expr or --table is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probmine: parse, translate, rewrite and model-check content-logic formulas"};
  app.require_subcommand(1);

  std::string formula_text, mode, rule, assume, model_path, rho_text, sort_text, suite;
  std::string seq_text, expr_text, table_text, kind_text, events_text, xs_text, fun_bounds;
  std::string alpha_text = "0";
  std::vector<std::string> beta_texts;
  std::uint64_t seed = 0, k_arg = 0, horizon = 0, nat_bound = static_cast<std::uint64_t>(-1);
  std::uint64_t m_max = 3, k_max = 2;
  bool flag_kuroda = false, flag_dialectica = false, flag_mr = false, flag_full = false;

  auto* c_parse = app.add_subcommand("parse", "parse a formula and print it back");
  c_parse->add_option("formula", formula_text)->required();

  auto* c_type = app.add_subcommand("typecheck", "typecheck a formula");
  c_type->add_option("formula", formula_text)->required();

  auto* c_tr = app.add_subcommand("translate", "apply a proof interpretation");
  c_tr->add_flag("--kuroda", flag_kuroda);
  c_tr->add_flag("--dialectica", flag_dialectica);
  c_tr->add_flag("--mr", flag_mr);
  c_tr->add_option("formula", formula_text)->required();

  auto* c_prob = app.add_subcommand("prob", "probability-statement operations");
  c_prob->add_option("action", mode, "expand | inner | form | interpret")->required();
  c_prob->add_option("formula", formula_text)->required();
  std::string interp_mode = "c";
  c_prob->add_option("--mode", interp_mode, "interpretation mode: c | i");

  auto* c_rw = app.add_subcommand("rewrite", "apply one prenexation rule");
  c_rw->add_option("--rule", rule)->required();
  c_rw->add_option("--assume", assume, "monotone | antimonotone side-condition annotation");
  c_rw->add_option("--model", model_path, "model file for semantic side checks");
  c_rw->add_option("formula", formula_text)->required();

  auto* c_schema = app.add_subcommand("schema", "instantiate a schema");
  c_schema->add_option("kind", kind_text, "ub | cc")->required();
  c_schema->add_option("--rho", rho_text);
  c_schema->add_option("--sort", sort_text, "omega | ev")->required();
  c_schema->add_option("--alpha", alpha_text);
  c_schema->add_option("--beta", beta_texts);
  c_schema->add_flag("--full", flag_full);
  c_schema->add_option("formula", formula_text)->required();

  auto* c_sig = app.add_subcommand("sigma-add", "render the sigma-additivity statement pair");
  c_sig->add_option("family", formula_text, "an Ev(0) expression")->required();

  auto* c_eval = app.add_subcommand("eval", "evaluate a formula on a finite model");
  c_eval->add_option("--model", model_path)->required();
  c_eval->add_option("--nat", nat_bound);
  c_eval->add_option("--fun", fun_bounds, "DxR");
  c_eval->add_option("formula", formula_text)->required();

  auto* c_ver = app.add_subcommand("verify", "run a verification suite");
  c_ver->add_option("--suite", suite)->required();
  c_ver->add_option("--model", model_path);
  c_ver->add_option("--seed", seed);

  auto* c_fl = app.add_subcommand("fluct", "count fluctuations of a rational sequence");
  c_fl->add_option("--seq", seq_text)->required();
  c_fl->add_option("--k", k_arg)->required();
  c_fl->add_option("--horizon", horizon)->required();

  auto* c_mod = app.add_subcommand("modulus", "transform or check a modulus");
  c_mod->add_option("action", mode, "transform | check")->required();
  c_mod->add_option("--expr", expr_text);
  c_mod->add_option("--table", table_text, "rows 'a b;c d' indexed [m][x]");
  c_mod->add_option("--kind", kind_text,
                    "io-pointwise | io-uniform | rate-as | metastable-uniform | "
                    "metastable-pointwise | fluctuation");
  c_mod->add_option("--model", model_path);
  c_mod->add_option("--events", events_text, "pipe-separated atom lists, e.g. 'a b|a|'");
  c_mod->add_option("--xs", xs_text, "rows 'v,v,..;v,v,..' indexed [n][atom]");
  c_mod->add_option("--mmax", m_max);
  c_mod->add_option("--kmax", k_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_parse) {
      std::cout << print_formula(parse_or_die(formula_text)) << "\n";
      return 0;
    }
    if (*c_type) {
      FormulaPtr f = parse_or_die(formula_text);
      try {
        typecheck(f);
      } catch (const TypeMismatch& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return 1;
      }
      std::cout << "OK\n";
      return 0;
    }
    if (*c_tr) {
      if (flag_kuroda + flag_dialectica + flag_mr != 1)
        throw UsageError("exactly one of --kuroda, --dialectica, --mr is required");
      FormulaPtr f = parse_or_die(formula_text);
      if (flag_kuroda) std::cout << print_formula(kuroda(f)) << "\n";
      if (flag_dialectica) std::cout << print_formula(render(dialectica(f))) << "\n";
      if (flag_mr) std::cout << print_formula(render(modified_realizability(f))) << "\n";
      return 0;
    }
    if (*c_prob) {
      FormulaPtr f = parse_or_die(formula_text);
      if (mode == "expand" || mode == "inner") {
        bool outer = mode == "expand";
        if (outer && f->kind != Formula::Kind::ProbGeq)
          throw UsageError("prob expand needs a formula Pr[ ... ] >= lam");
        if (!outer && f->kind != Formula::Kind::ProbLeq)
          throw UsageError("prob inner needs a formula Pr[ ... ] <= lam");
        FormulaPtr out = outer ? outer_expand(f->lhs, f->rl) : inner_expand(f->lhs, f->rl);
        std::cout << print_formula(out) << "\n";
        return 0;
      }
      if (mode == "form") {
        ProbForm pf = detect_form(f);
        std::cout << to_string(pf.shape);
        if (pf.shape != ProbShape::Other)
          std::cout << " outer=" << pf.outer_name << ":" << pf.outer_type.to_string()
                    << " inner=" << pf.inner_name;
        if (pf.shape == ProbShape::Form3) std::cout << " error=" << pf.error_name;
        if (!pf.diagnostic.empty()) std::cout << " diagnostic=\"" << pf.diagnostic << "\"";
        std::cout << "\n";
        return 0;
      }
      if (mode == "interpret") {
        if (interp_mode != "c" && interp_mode != "i")
          throw UsageError("--mode must be c or i");
        ModulusSpec spec = quantitative_interpretation(
            detect_form(f),
            interp_mode == "c" ? InterpMode::Classical : InterpMode::Semiconstructive);
        std::cout << to_string(spec.kind) << "\n"
                  << print_formula(spec.spec_formula) << "\n"
                  << "note: " << spec.majorant_note << "\n";
        return 0;
      }
      throw UsageError("prob action must be expand | inner | form | interpret");
    }
    if (*c_rw) {
      FormulaPtr f = parse_or_die(formula_text);
      SideEvidence side;
      LoadedModel lm;
      if (!model_path.empty()) {
        lm = load_model_file(model_path);
        side.model = &lm.space;
        side.bounds = lm.bounds;
      }
      if (assume == "monotone")
        side.mono = MonotoneVerdict{MonoDir::Monotone, MonoEvidence::Annotated, "cli"};
      else if (assume == "antimonotone")
        side.mono = MonotoneVerdict{MonoDir::AntiMonotone, MonoEvidence::Annotated, "cli"};
      else if (!assume.empty())
        throw UsageError("--assume must be monotone or antimonotone");
      RewriteResult res = prenex_rewrite(f, rule, side);
      std::cout << print_formula(res.formula) << "\n"
                << "principles: " << res.justification.to_string() << "\n";
      return 0;
    }
    if (*c_schema) {
      SchemaSort sort;
      if (sort_text == "omega") sort = SchemaSort::Omega;
      else if (sort_text == "ev") sort = SchemaSort::Ev;
      else throw UsageError("--sort must be omega or ev");
      std::vector<Type> betas;
      for (const auto& b : beta_texts) betas.push_back(parse_type(b));
      SchemaInstance inst;
      if (kind_text == "ub") {
        if (rho_text.empty()) throw UsageError("schema ub requires --rho");
        inst = instantiate_ub(parse_type(rho_text), sort, parse_or_die(formula_text),
                              parse_type(alpha_text), betas,
                              flag_full ? UBMode::Full : UBMode::Restricted);
      } else if (kind_text == "cc") {
        inst = instantiate_cc(sort, parse_or_die(formula_text), betas);
      } else {
        throw UsageError("schema kind must be ub or cc");
      }
      std::cout << inst.principle << "\n" << print_formula(inst.rendered) << "\n";
      return 0;
    }
    if (*c_sig) {
      auto [lower, upper] = sigma_additivity_statement(parse_expr(formula_text));
      std::cout << print_formula(lower) << "\n" << print_formula(upper) << "\n";
      return 0;
    }
    if (*c_eval) {
      LoadedModel lm = load_with_bounds(model_path, nat_bound, fun_bounds);
      bool v = eval(parse_or_die(formula_text), lm.space, lm.bounds);
      std::cout << (v ? "true" : "false") << "\n";
      return 0;
    }
    if (*c_ver) {
      if (!verify::suite_needs_model(suite) && suite != "roundtrip" &&
          suite != "interp-equiv" && suite != "fluct")
        throw UsageError("unknown suite: " + suite);
      if (verify::suite_needs_model(suite) && model_path.empty()) {
        // no model given: run the suite across the builtin fleet
        int rc = 0;
        for (const auto& lm : gen::builtin_fleet())
          rc |= emit_report(verify::run_suite(suite, &lm, seed), lm.space.id);
        return rc;
      }
      LoadedModel lm;
      const LoadedModel* lmp = nullptr;
      if (!model_path.empty()) {
        lm = load_model_file(model_path);
        lmp = &lm;
      }
      return emit_report(verify::run_suite(suite, lmp, seed),
                         lmp ? lm.space.id : std::string{});
    }
    if (*c_fl) {
      std::vector<Rat> xs;
      for (const auto& tok : split(seq_text, ',')) xs.push_back(parse_rational(tok));
      std::cout << count_fluctuations(xs, static_cast<unsigned>(k_arg), horizon) << "\n";
      return 0;
    }
    if (*c_mod) {
      ModulusTable phi = parse_modulus_arg(expr_text, table_text);
      if (mode == "transform") {
        std::cout << transform_modulus_equiv(phi).to_string() << "\n";
        return 0;
      }
      if (mode == "check") {
        static const std::map<std::string, ModulusKind> kinds = {
            {"io-pointwise", ModulusKind::IOPointwise},
            {"io-uniform", ModulusKind::IOUniform},
            {"rate-as", ModulusKind::RateAS},
            {"metastable-uniform", ModulusKind::MetastableUniform},
            {"metastable-pointwise", ModulusKind::MetastablePointwise},
            {"fluctuation", ModulusKind::Fluctuation}};
        auto it = kinds.find(kind_text);
        if (it == kinds.end()) throw UsageError("unknown --kind: " + kind_text);
        if (model_path.empty()) throw UsageError("modulus check requires --model");
        LoadedModel lm = load_model_file(model_path);
        ProcessData data;
        if (!events_text.empty()) {
          for (const auto& ev : split(events_text, '|')) {
            std::uint64_t mask = 0;
            std::istringstream ss(ev);
            std::string atom;
            while (ss >> atom) mask |= 1ull << lm.space.atom_index(atom);
            data.sets.push_back(mask);
          }
        }
        if (!xs_text.empty()) {
          for (const auto& row : split(xs_text, ';')) {
            std::vector<Rat> vals;
            for (const auto& tok : split(row, ',')) vals.push_back(parse_rational(tok));
            if (vals.size() != lm.space.omega.size())
              throw UsageError("--xs rows must have one value per sample point");
            data.xs.push_back(std::move(vals));
          }
        }
        if (data.length() == 0) throw UsageError("modulus check requires --events or --xs");
        ModulusCheck res = check_modulus(it->second, phi, lm.space, data, lm.bounds,
                                         static_cast<unsigned>(m_max),
                                         static_cast<unsigned>(k_max));
        if (res.pass) {
          std::cout << "PASS kind=" << to_string(it->second) << " model=" << lm.space.id
                    << "\n";
          return 0;
        }
        std::cout << "FAIL kind=" << to_string(it->second) << " model=" << lm.space.id << " "
                  << res.counterexample << "\n";
        return 1;
      }
      throw UsageError("modulus action must be transform or check");
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UnboundVariable& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
