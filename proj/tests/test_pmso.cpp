#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "spkit/membership.hpp"
#include "spkit/pmso.hpp"
#include "spkit/rexpr.hpp"

using namespace spkit;

namespace {

// Raises the model size cap for one scope.
struct SizeCap {
  std::optional<std::string> old;
  explicit SizeCap(int n) {
    if (const char* v = std::getenv("SPKIT_MAX_POSET_SIZE")) old = v;
    setenv("SPKIT_MAX_POSET_SIZE", std::to_string(n).c_str(), 1);
  }
  ~SizeCap() {
    if (old)
      setenv("SPKIT_MAX_POSET_SIZE", old->c_str(), 1);
    else
      unsetenv("SPKIT_MAX_POSET_SIZE");
  }
};

bool check(const std::string& formula, const std::string& term, const Assignment& a = {}) {
  return model_check(parse_formula(formula), parse_term(term), a);
}

// Q with psi_i = "some element is labelled letters[i]", decided by trying
// every assignment of parallel components to formulas.
bool q_by_hand(const SPTerm& t, const std::vector<std::string>& letters, const SemiLinear& s) {
  Poset p = to_poset(t);
  auto comps = p.par_components(p.all());
  std::size_t k = letters.size();
  Vec y(k, 0);
  std::function<bool(std::size_t)> go = [&](std::size_t j) {
    if (j == comps.size()) return member(s, y);
    for (std::size_t i = 0; i < k; ++i) {
      bool has = false;
      for_each_bit(comps[j], [&](int e) { has = has || p.label[e] == letters[i]; });
      if (!has) continue;
      ++y[i];
      if (go(j + 1)) return true;
      --y[i];
    }
    return false;
  };
  return go(0);
}

const std::vector<std::string> kCorpus = {
    "sub(x,a,istar(x,seq(a,par(x,x))))",
    "star(seq(a,b))",
    "omega(par(a,b))",
    "momega(a)",
    "ord(or(a,b))",
    "mord(par(a,b))",
    "diamond(b)",
    "dia(a,b)",
    "istar(x,par(a,star(x)))",
    "or(seq(a,b),par(a,star(b)))",
    "par(star(a),b)",
};

}  // namespace

TEST_SUITE("pmso") {
  TEST_CASE("counting quantifier over a three-component poset") {
    SizeCap cap(12);
    const char* p = "par(seq(a1,par(a1,a1),a1),seq(a2,a2),seq(par(a1,a2),a1))";
    auto q = [](const std::string& rho) {
      return "exists Z (forall z (z in Z) & Q(Z; exists x (a1(x)), exists x (a2(x)); " + rho + "))";
    };
    CHECK(check(q("x1 = 0 mod 2 and x2 = 1 mod 2"), p));
    CHECK(check(q("x1 = 1 mod 2 and x2 = 0 mod 2"), p));
    CHECK_FALSE(check(q("x1 = 3"), p));
    CHECK_FALSE(check(q("x2 = 0"), p));
    CHECK(check(q("x1 + x2 = 3"), p));
    CHECK_FALSE(check(q("x1 + x2 = 2"), p));
  }

  TEST_CASE("counting quantifier agrees with a direct count") {
    std::mt19937 rng(7);
    const std::vector<std::string> sets = {"x1 = 0 mod 2", "x1 >= x2", "x1 + x2 = 2", "x2 = 1 mod 2 and x1 <= 1",
                                           "x1 = 2*x2", "true"};
    auto posets = enumerate_posets({"a", "b"}, 5);
    int tried = 0;
    for (const auto& text : sets) {
      SemiLinear s = from_constraints(text, 2);
      auto f = fm::exists("Z", fm::and_({fm::forall("z", fm::in("z", "Z")),
                                         fm::q("Z",
                                               {fm::exists("x", fm::letter("a", "x")),
                                                fm::exists("x", fm::letter("b", "x"))},
                                               s)}));
      for (int k = 0; k < 80; ++k) {
        const SPTerm& t = posets[1 + rng() % (posets.size() - 1)];
        CAPTURE(text);
        CAPTURE(t.text());
        CHECK(model_check(f, t) == q_by_hand(t, {"a", "b"}, s));
        ++tried;
      }
    }
    CHECK(tried == 480);
  }

  TEST_CASE("Q only applies to factors and relativizes to components") {
    // The inner formula sees only its own component.
    CHECK(check("exists Z (forall z (z in Z) & Q(Z; exists x (b(x)); x1 >= 0))", "par(b,b)"));
    CHECK_FALSE(check("exists Z (forall z (z in Z) & Q(Z; exists x (b(x)); x1 >= 0))", "par(a,b)"));
    CHECK(check("exists Z (forall z (z in Z) & Q(Z; exists x (exists y (x < y)), true; x1 = 1 and x2 = 1))",
                "par(seq(a,a),a)"));
    // A proper sub-factor qualifies, a non-convex set does not.
    CHECK(check("exists Z (size(Z,2) & Q(Z; true; x1 = 2))", "seq(a,par(b,b))"));
    CHECK_FALSE(check("exists Z (size(Z,2) & Q(Z; true; x1 = 2))", "seq(a,b,a)"));
  }

  TEST_CASE("atoms") {
    Poset p = to_poset(parse_term("seq(a,par(b,c),d)"));
    Assignment asg;
    asg.elems = {{"x", 0}, {"y", 3}, {"z", 1}};
    asg.sets = {{"A", p.all()}, {"B", p.mask_of({"a"})}, {"C", p.all() & ~p.mask_of({"a"})},
                {"D", p.mask_of({"b", "c"})}, {"E", p.mask_of({"a", "b"})}};
    auto t = parse_term("seq(a,par(b,c),d)");
    auto mc = [&](const std::string& s) { return model_check(parse_formula(s), t, asg); };
    CHECK(mc("a(x)"));
    CHECK_FALSE(mc("b(x)"));
    CHECK(mc("x < y"));
    CHECK_FALSE(mc("y < x"));
    CHECK(mc("x in B & ~(y in B)"));
    CHECK(mc("seqsum(A,B,C)"));
    CHECK_FALSE(mc("seqsum(A,C,B)"));
    CHECK_FALSE(mc("seqsum(C,D,D)"));
    CHECK(mc("factor(D,A) & ~seqfactor(D,A)"));
    CHECK(mc("seqfactor(C,A)"));
    CHECK_FALSE(mc("factor(E,A)"));
    CHECK(mc("size(D,2) & size(A,4)"));
    CHECK(mc("forall w (w in A)"));
    CHECK(mc("exists w (z < w & w in C & d(w))"));
    CHECK_THROWS_AS(mc("a(q)"), UnboundVariable);
    CHECK_THROWS_AS(mc("size(Q,1)"), UnboundVariable);
    CHECK_THROWS_AS(mc("scoloring(A,S)"), UnboundVariable);
  }

  TEST_CASE("native sequential sum matches its first-order definition") {
    auto native = parse_formula("exists Y (exists Z (seqsum(X,Y,Z) & a(x) & x in Y))");
    auto plain = parse_formula(
        "exists Y (exists Z (exists u (u in Y) & exists u (u in Z) & "
        "forall u (u in X -> (u in Y | u in Z) & ~(u in Y & u in Z)) & "
        "forall u (forall v (u in Y & v in Z -> u < v)) & forall u (u in Y | u in Z -> u in X) & "
        "a(x) & x in Y))");
    for (const auto& t : enumerate_posets({"a", "b"}, 4)) {
      if (t.empty()) continue;
      Poset p = to_poset(t);
      for (int x = 0; x < p.n; ++x) {
        Assignment a;
        a.elems["x"] = x;
        a.sets["X"] = p.all();
        CAPTURE(t.text());
        CHECK(model_check(native, t, a) == model_check(plain, t, a));
      }
    }
  }

  TEST_CASE("size cap") {
    CHECK(max_model_size() == 8);
    CHECK_THROWS_AS(check("true", "seq(a,a,a,a,a,a,a,a,a)"), ResourceBound);
    SizeCap cap(9);
    CHECK(max_model_size() == 9);
    CHECK(check("true", "seq(a,a,a,a,a,a,a,a,a)"));
  }

  TEST_CASE("printing and parsing") {
    auto f = parse_formula("a(x) & b(x) | c(x) -> d(x) -> e(x)");
    REQUIRE(f->kind == Formula::Kind::Implies);
    CHECK(f->kids[0]->kind == Formula::Kind::Or);
    CHECK(f->kids[0]->kids[0]->kind == Formula::Kind::And);
    CHECK(f->kids[1]->kind == Formula::Kind::Implies);
    CHECK(print_formula(f) == "a(x) & b(x) | c(x) -> d(x) -> e(x)");
    CHECK(print_formula(parse_formula("(a(x) -> b(x)) -> c(x)")) == "(a(x) -> b(x)) -> c(x)");
    CHECK(print_formula(parse_formula("a(x) & (b(x) & c(x))")) == "a(x) & (b(x) & c(x))");
    CHECK(print_formula(parse_formula("~(a(x) | b(x))")) == "~(a(x) | b(x))");

    auto q = parse_formula("Q(Z; true, true; x1+x2=1)");
    REQUIRE(q->kind == Formula::Kind::Q);
    CHECK(q->kids.size() == 2);
    CHECK(equal_on_box(q->set, SemiLinear::points(2, {{1, 0}, {0, 1}}), 20));

    for (const char* s :
         {"exists X (forall x (x in X -> a(x)))", "seqsum(X,Y,Z) & size(Y,3)", "factor(F,R) | seqfactor(F,R)",
          "iter(X,Y,momega,1; Q(Y; true; sl<1>{lin((0);(1))}))", "dia(X,Y,0,1; a(y); size(Y,0))",
          "existscol S [n4->n2, n7->n1] (col(F,S,1,n7->n1) & scoloring(R,S))", "existscol S [] (true)",
          "Q(Z; ; sl<0>{lin(();)})", "false | ~true"}) {
      CAPTURE(s);
      auto g = parse_formula(s);
      CHECK(formula_equal(parse_formula(print_formula(g)), g));
    }
    CHECK_THROWS_AS(parse_formula("a(x) &"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("exists x a(x)"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("iter(X,Y,plus,0; true)"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("Q(Z; true; sl<2>{lin((1,1);)})"), DimensionMismatch);
    CHECK_THROWS_AS(parse_formula("col(F,S,0,4->2)"), SyntaxError);
  }

  TEST_CASE("json mirrors the tree") {
    auto j = to_json(parse_formula("exists X (size(X,2) & col(X,S,1,n4->n2))"));
    CHECK(j["kind"] == "exists");
    CHECK(j["vars"][0] == "X");
    CHECK(j["kids"][0]["kind"] == "and");
    CHECK(j["kids"][0]["kids"][0]["size"] == 2);
    CHECK(j["kids"][0]["kids"][1]["edge"] == "n4->n2");
    CHECK(j["kids"][0]["kids"][1]["bool"] == 1);
  }

  TEST_CASE("node formulas of the running example") {
    DGraph d = build_rational(parse_expr("sub(x,a,istar(x,seq(a,par(x,x))))"));
    int set_node = 0, letter_node = 0;
    for (const auto& [id, n] : d.nodes) {
      if (n.label.is_pres() && n.out.size() == 2 && n.out[0].special) set_node = id;
      if (n.label.is_letter("a")) letter_node = id;
    }
    REQUIRE(set_node != 0);
    CHECK(print_formula(emit_phi_node(d, letter_node)) == "size(X,1) & forall x (x in X -> a(x))");

    auto q = emit_phi_node(d, set_node);
    REQUIRE(q->kind == Formula::Kind::Q);
    CHECK(q->vars[0] == "X");
    CHECK(equal_on_box(q->set, from_constraints("x1 + x2 = 2", 2), 20));
    // The special edge is read off the colouring, the normal one recurses.
    auto chi = q->kids[0]->kids[0]->kids[1];
    REQUIRE(chi->kind == Formula::Kind::Or);
    CHECK(chi->kids[0]->kind == Formula::Kind::Color);
    CHECK(chi->kids[0]->edge == SpecialEdge{set_node, d.at(set_node).out[0].to});
    CHECK(chi->kids[1]->number == 1);
    CHECK(print_formula(q->kids[1]->kids[0]->kids[1]).find("a(x)") != std::string::npos);

    auto phi = emit_phi(d, false);
    CHECK(print_formula(phi).rfind("exists R (existscol S [", 0) == 0);
    CHECK(formula_equal(parse_formula(print_formula(phi)), phi));
    auto nullable_phi = emit_phi(d, true);
    CHECK(nullable_phi->kind == Formula::Kind::Or);
    CHECK(model_check(nullable_phi, SPTerm::eps()));
    CHECK_FALSE(model_check(phi, SPTerm::eps()));
  }

  TEST_CASE("sentence decides membership on small posets") {
    for (const auto& text : kCorpus) {
      auto e = parse_expr(text);
      DGraph d = build_rational(e);
      auto phi = emit_phi(d, nullable(e));
      auto alphabet = graph_letters(d);
      for (const auto& t : enumerate_posets(alphabet, 3)) {
        CAPTURE(text);
        CAPTURE(t.text());
        CHECK(model_check(phi, t) == member_expr(e, t));
      }
    }
  }

  TEST_CASE("node formulas agree with graph membership from that node") {
    for (const auto& text : kCorpus) {
      DGraph d = build_rational(parse_expr(text));
      if (!special_edges(d).empty()) continue;
      auto alphabet = graph_letters(d);
      for (const auto& [id, n] : d.nodes) {
        DGraph sub = d;
        sub.root = id;
        sub = collect_garbage(sub);
        auto f = fm::exists_coloring("S", {}, emit_phi_node(sub, sub.root, "R"));
        for (const auto& t : enumerate_posets(alphabet, 3)) {
          if (t.empty()) continue;
          Assignment a;
          a.sets["R"] = to_poset(t).all();
          CAPTURE(text);
          CAPTURE(id);
          CAPTURE(t.text());
          CHECK(model_check(f, t, a) == member_dgraph(sub, t));
        }
      }
    }
  }
}
