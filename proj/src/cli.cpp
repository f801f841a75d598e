#include "spkit/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "spkit/crosscheck.hpp"
#include "spkit/dgraph.hpp"
#include "spkit/membership.hpp"
#include "spkit/pmso.hpp"
#include "spkit/poset.hpp"
#include "spkit/rexpr.hpp"
#include "spkit/semilinear.hpp"

namespace spkit::cli {

namespace {

struct InvariantBroken : Error {
  using Error::Error;
};

// A term, or a relation given as JSON ({"elements": ..., "order": ..., "labels": ...}).
SPTerm read_poset(const std::string& text) {
  auto b = text.find_first_not_of(" \t\n");
  if (b != std::string::npos && text[b] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SyntaxError(std::string("bad poset json: ") + e.what(), 0);
    }
    return sp_decompose(relation_from_json(j));
  }
  return parse_term(text);
}

void require_properties(const DGraph& d, const std::set<std::string>& binders) {
  PropertyReport r = check_properties(d, binders);
  if (!r.all()) {
    std::string missing;
    auto note = [&](bool ok, const char* name) {
      if (!ok) missing += std::string(missing.empty() ? "" : ", ") + name;
    };
    note(r.pp, "PP");
    note(r.ss, "SS");
    note(r.dag, "DAG");
    note(r.xi_normalized, "xi-normalization");
    note(r.arity, "arity");
    throw InvariantBroken("graph violates " + missing);
  }
}

DGraph checked_graph(const ExprP& e) {
  DGraph d = build_rational(e);
  require_properties(d, binders(e));
  return d;
}

Vec read_vec(const std::string& text) {
  Vec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long long x = std::stoll(item, &used);
      if (x < 0) throw SyntaxError("negative vector entry", 0);
      v.push_back(x);
    } catch (const std::logic_error&) {
      throw SyntaxError("bad vector entry '" + item + "'", 0);
    }
  }
  return v;
}

int verdict(bool b, std::ostream& out) {
  out << (b ? "true" : "false") << "\n";
  return b ? kTrue : kFalse;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Series-parallel poset languages: expressions, D-graphs, P-MSO"};
  app.require_subcommand(1);

  std::string expr, poset, formula;
  bool json = false;

  auto* parse = app.add_subcommand("parse", "Print the canonical text of an expression, poset or formula");
  parse->add_option("-e,--expr", expr, "rational expression");
  parse->add_option("-p,--poset", poset, "poset term or relation json");
  parse->add_option("-f,--formula", formula, "P-MSO formula");
  parse->add_flag("--json", json, "JSON output where available");

  bool no_check = false;
  auto* gt1 = app.add_subcommand("gt1", "Rewrite into >1 form");
  gt1->add_option("-e,--expr", expr)->required();
  gt1->add_flag("--no-check", no_check, "skip the side-condition check");

  bool dot = false;
  auto* dgraph = app.add_subcommand("dgraph", "Build the D-graph of an expression");
  std::string graph_file;
  auto* dg_expr = dgraph->add_option("-e,--expr", expr);
  dgraph->add_option("-g,--graph", graph_file, "check and re-emit a graph saved as json")->excludes(dg_expr);
  auto* dot_flag = dgraph->add_flag("--dot", dot, "Graphviz output (default)");
  dgraph->add_flag("--json", json)->excludes(dot_flag);

  std::string via = "expr";
  bool witness = false;
  auto* member_cmd = app.add_subcommand("member", "Decide membership of a poset");
  member_cmd->add_option("-e,--expr", expr)->required();
  member_cmd->add_option("-p,--poset", poset)->required();
  member_cmd->add_option("--via", via, "decider")->check(CLI::IsMember({"expr", "dgraph", "pmso"}));
  member_cmd->add_flag("--witness", witness, "with --via dgraph, print the path as json");

  int n = 3;
  std::vector<std::string> alphabet;
  auto* en = app.add_subcommand("enum", "List language members, or all posets, up to a size");
  en->add_option("-e,--expr", expr);
  en->add_option("-n", n, "largest size")->check(CLI::NonNegativeNumber);
  en->add_option("-a,--alphabet", alphabet, "letters, when no expression is given")->delimiter(',');

  auto* pm = app.add_subcommand("pmso", "Emit the sentence of an expression, or model-check a formula");
  pm->add_option("-e,--expr", expr);
  pm->add_option("-f,--formula", formula);
  pm->add_option("-p,--poset", poset, "model; required with -f");
  pm->add_flag("--json", json);

  std::string op, set1, set2, constraints, vec_text;
  int idx = 1, idx2 = 1, dim = 1, box = 12;
  bool same = false;
  auto* sl = app.add_subcommand("semilinear", "Operations on semilinear sets");
  sl->add_option("op", op, "show | member | union | subst | power | star | from | equal")
      ->required()
      ->check(CLI::IsMember({"show", "member", "union", "subst", "power", "star", "from", "equal"}));
  sl->add_option("-s,--set", set1, "set text, e.g. sl<2>{lin((1,0);(0,1))}");
  sl->add_option("-t,--other", set2, "second set (union, subst outer, equal)");
  sl->add_option("-v,--vector", vec_text, "vector for member, comma separated");
  sl->add_option("-i", idx, "coordinate (1-based)");
  sl->add_option("-j", idx2, "iteration count for power");
  sl->add_option("-c,--constraints", constraints, "constraint text for from");
  sl->add_option("-d,--dim", dim, "dimension for from");
  sl->add_option("-b,--box", box, "box bound for equal");
  sl->add_flag("--same", same, "subst over the same alphabet");
  sl->add_flag("--json", json);

  std::string corpus = "builtin", report_path;
  int pmso_max = -1, cc_n = 5;
  bool serial = false, rows = false;
  auto* cc = app.add_subcommand("crosscheck", "Compare the three deciders over all small posets");
  cc->add_option("-c,--corpus", corpus, "corpus file, or 'builtin'");
  cc->add_option("-n", cc_n, "largest poset size")->check(CLI::NonNegativeNumber);
  cc->add_option("--pmso-max", pmso_max, "largest size for the model-checking leg (default: -n)");
  cc->add_option("-a,--alphabet", alphabet)->delimiter(',');
  cc->add_option("-o,--output", report_path, "write the JSON report here");
  cc->add_flag("--serial", serial, "no threads");
  cc->add_flag("--rows", rows, "include every pair in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kTrue : kBadInput;
  }

  try {
    if (*parse) {
      int given = !expr.empty() + !poset.empty() + !formula.empty();
      if (given != 1) throw PreconditionViolated("give exactly one of -e, -p, -f");
      if (!expr.empty()) {
        out << to_text(parse_expr(expr)) << "\n";
      } else if (!poset.empty()) {
        SPTerm t = read_poset(poset);
        if (json)
          out << to_json(to_relation(t)).dump(2) << "\n";
        else
          out << t.text() << "\n";
      } else {
        FormulaP f = parse_formula(formula);
        out << (json ? to_json(f).dump(2) : print_formula(f)) << "\n";
      }
      return kTrue;
    }
    if (*gt1) {
      out << to_text(to_gt1(parse_expr(expr), !no_check)) << "\n";
      return kTrue;
    }
    if (*dgraph) {
      DGraph d;
      if (!graph_file.empty()) {
        std::ifstream in(graph_file);
        if (!in) throw PreconditionViolated("cannot read " + graph_file);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw SyntaxError(std::string("bad graph json: ") + e.what(), 0);
        }
        d = dgraph_from_json(j);
        require_properties(d, {});
      } else if (!expr.empty()) {
        d = checked_graph(parse_expr(expr));
      } else {
        throw PreconditionViolated("give -e or -g");
      }
      out << (json ? to_json(d).dump(2) + "\n" : to_dot(d));
      return kTrue;
    }
    if (*member_cmd) {
      ExprP e = parse_expr(expr);
      SPTerm p = read_poset(poset);
      if (via == "expr") {
        auto problems = validate(e);
        if (!problems.empty()) throw ValidationFailed(problems);
        return verdict(member_expr(e, p), out);
      }
      DGraph d = checked_graph(e);
      if (via == "pmso") return verdict(model_check(emit_phi(d, nullable(e)), p), out);
      if (!witness) return verdict(member_dgraph(d, p), out);
      auto path = find_path(d, p);
      if (!path) return verdict(false, out);
      out << to_json(*path, to_poset(p)).dump(2) << "\n";
      return kTrue;
    }
    if (*en) {
      std::set<SPTerm> terms;
      if (!expr.empty()) {
        terms = enumerate_language(parse_expr(expr), n);
      } else {
        if (alphabet.empty()) throw PreconditionViolated("give -e or an alphabet");
        auto all = enumerate_posets(alphabet, n);
        terms.insert(all.begin(), all.end());
      }
      std::vector<SPTerm> sorted(terms.begin(), terms.end());
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const SPTerm& a, const SPTerm& b) { return a.size() < b.size(); });
      for (const auto& t : sorted) out << (t.empty() ? "eps" : t.text()) << "\n";
      return kTrue;
    }
    if (*pm) {
      if (expr.empty() == formula.empty()) throw PreconditionViolated("give exactly one of -e, -f");
      if (!expr.empty()) {
        ExprP e = parse_expr(expr);
        FormulaP phi = emit_phi(checked_graph(e), nullable(e));
        if (poset.empty()) {
          out << (json ? to_json(phi).dump(2) : print_formula(phi)) << "\n";
          return kTrue;
        }
        return verdict(model_check(phi, read_poset(poset)), out);
      }
      if (poset.empty()) throw PreconditionViolated("-f needs a model, give -p");
      return verdict(model_check(parse_formula(formula), read_poset(poset)), out);
    }
    if (*sl) {
      auto need = [](const std::string& s, const char* what) {
        if (s.empty()) throw PreconditionViolated(std::string("missing ") + what);
        return parse_semilinear(s);
      };
      auto show = [&](const SemiLinear& s) {
        out << (json ? to_json(s).dump(2) : to_text(s)) << "\n";
        return kTrue;
      };
      if (op == "show") return show(simplify(need(set1, "-s")));
      if (op == "member") return verdict(member(need(set1, "-s"), read_vec(vec_text)), out);
      if (op == "union") return show(set_union(need(set1, "-s"), need(set2, "-t")));
      if (op == "subst") {
        SemiLinear inner = need(set1, "-s"), outer = need(set2, "-t");
        return show(same ? subst_same(inner, outer, idx) : subst_disjoint(inner, outer, idx));
      }
      if (op == "power") return show(power_subst(need(set1, "-s"), idx, idx2));
      if (op == "star") return show(star_subst(need(set1, "-s"), idx));
      if (op == "from") {
        if (constraints.empty()) throw PreconditionViolated("missing -c");
        return show(from_constraints(constraints, dim));
      }
      return verdict(equal_on_box(need(set1, "-s"), need(set2, "-t"), box), out);
    }
    if (*cc) {
      CrosscheckConfig config;
      if (corpus == "builtin") {
        config.corpus = builtin_corpus();
      } else {
        std::ifstream in(corpus);
        if (!in) throw PreconditionViolated("cannot read corpus " + corpus);
        config.corpus = read_corpus(in);
      }
      for (const auto& text : config.corpus) checked_graph(parse_expr(text));
      config.max_size = cc_n;
      config.pmso_max_size = pmso_max < 0 ? cc_n : pmso_max;
      config.parallel = !serial;
      if (!alphabet.empty()) config.alphabet = alphabet;
      CrosscheckReport r = crosscheck(config);
      out << r.corpus.size() << " expressions, " << r.rows.size() << " pairs, " << r.agreements << " agree, "
          << r.pmso_checks << " model checks\n";
      if (r.first_disagreement) {
        const auto& d = *r.first_disagreement;
        out << "disagreement: " << r.corpus[d.expression] << " on " << (d.poset.empty() ? "eps" : d.poset)
            << ": expr=" << d.by_expr << " dgraph=" << d.by_dgraph
            << " pmso=" << (d.by_pmso ? std::to_string(*d.by_pmso) : "-") << "\n";
      }
      if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) throw PreconditionViolated("cannot write " + report_path);
        f << r.to_json(rows).dump(2) << "\n";
      }
      return r.ok() ? kTrue : kFalse;
    }
  } catch (const ValidationFailed& e) {
    for (const auto& v : e.violations) err << "validation: " << v << "\n";
    return kBadInput;
  } catch (const InvariantBroken& e) {
    err << "invariant: " << e.what() << "\n";
    return kInvariant;
  } catch (const VerificationFailed& e) {
    err << "invariant: " << e.what() << "\n";
    return kInvariant;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "internal: " << e.what() << "\n";
    return kInvariant;
  }
  return kBadInput;
}

}  // namespace spkit::cli
