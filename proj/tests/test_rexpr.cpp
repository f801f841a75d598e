#include <doctest.h>

#include <algorithm>
#include <string>

#include "spkit/crosscheck.hpp"
#include "spkit/membership.hpp"
#include "spkit/poset.hpp"
#include "spkit/rexpr.hpp"

using namespace spkit;

namespace {

const std::string kBranching = "sub(x,a,istar(x,seq(a,par(x,x))))";

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_SUITE("rexpr") {
  TEST_CASE("parse and print") {
    auto e = parse_expr("sub(x, a, istar(x, seq(a, par(x,x))))");
    CHECK(e->kind == Expr::Kind::Sub);
    CHECK(e->letter == "x");
    REQUIRE(e->kids.size() == 2);
    CHECK(e->kids[0]->kind == Expr::Kind::Letter);
    CHECK(e->kids[1]->kind == Expr::Kind::IStar);
    CHECK(to_text(e) == kBranching);
    CHECK(parse_expr("eps")->kind == Expr::Kind::Eps);
    CHECK(parse_expr("empty")->kind == Expr::Kind::Empty);
    CHECK_THROWS_AS(parse_expr("star("), SyntaxError);
    CHECK_THROWS_AS(parse_expr("seq(a,b"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("dia(a)"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("a b"), SyntaxError);
    for (const auto& text : builtin_corpus()) CHECK(to_text(parse_expr(to_text(parse_expr(text)))) == text);
  }

  TEST_CASE("nullability") {
    CHECK(nullable(parse_expr("star(a)")));
    CHECK_FALSE(nullable(parse_expr(kBranching)));
    CHECK(nullable(parse_expr("or(eps,a)")));
    CHECK(nullable(parse_expr("diamond(b)")));
    CHECK_FALSE(nullable(parse_expr("empty")));
    CHECK_FALSE(nullable(parse_expr("par(star(a),b)")));
    CHECK(nullable(parse_expr("sub(x,a,star(x))")));
  }

  TEST_CASE("side conditions") {
    auto v = validate(parse_expr("istar(x,seq(a,x,b))"));
    CHECK(has(v, kXiComparable));
    v = validate(parse_expr("sub(x,or(eps,a),b)"));
    CHECK(has(v, kEpsInSub));
    v = validate(parse_expr("istar(x,or(eps,par(a,x)))"));
    CHECK(has(v, kEpsInIStar));
    CHECK(validate(parse_expr(kBranching)).empty());
    CHECK(validate(parse_expr("istar(x,par(a,star(x)))")).empty());
    CHECK_THROWS_AS(to_gt1(parse_expr("istar(x,seq(a,x,b))")), ValidationFailed);
    CHECK_NOTHROW(to_gt1(parse_expr("istar(x,seq(a,x,b))"), false));
  }

  TEST_CASE("rewrite to >1 form") {
    auto e1 = parse_expr(kBranching);
    auto g1 = to_gt1(e1);
    CHECK(to_text(g1) == "sub(x,a,istar(x,seq1(a,par(x,x))))");
    auto e2 = parse_expr("dia(" + kBranching + ",diamond(b))");
    CHECK(to_text(to_gt1(e2)) == "or(dia1(" + to_text(g1) + ",or(dia1(b,eps),b,eps))," + to_text(g1) + ")");
    CHECK(to_text(to_gt1(parse_expr("star(a)"))) == "or(star1(a),a,eps)");
    CHECK(to_text(to_gt1(parse_expr("seq(a,b)"))) == "seq1(a,b)");
    CHECK(to_text(to_gt1(parse_expr("seq(star(a),b)"))) == "or(seq1(or(star1(a),a,eps),b),b)");
    for (const auto& text : builtin_corpus()) {
      CAPTURE(text);
      auto g = to_gt1(parse_expr(text));
      CHECK(is_gt1(g));
      CHECK(to_text(to_gt1(parse_expr(text))) == to_text(g));
    }
  }

  TEST_CASE("rewrite preserves the language and nullability") {
    for (const auto& text : builtin_corpus()) {
      CAPTURE(text);
      auto e = parse_expr(text);
      auto g = to_gt1(e);
      CHECK(nullable(g) == nullable(e));
      CHECK(nullable(e) == member_expr(e, SPTerm{}));
      auto ls = letters(e);
      ExprLanguage le(e), lg(g);
      for (const auto& p : enumerate_posets({ls.begin(), ls.end()}, 5)) {
        CAPTURE(p.text());
        CHECK(le.contains(p) == lg.contains(p));
      }
    }
  }
}
