#include <doctest.h>

#include <set>
#include <string>

#include "spkit/crosscheck.hpp"
#include "spkit/dgraph.hpp"
#include "spkit/membership.hpp"
#include "spkit/poset.hpp"
#include "spkit/rexpr.hpp"

using namespace spkit;

namespace {

const std::string kBranching = "sub(x,a,istar(x,seq(a,par(x,x))))";

DNode leaf(const std::string& a) { return {NodeLabel::of_letter(a), {}}; }

DNode pres(SemiLinear s, std::vector<OutEdge> out) { return {NodeLabel::of_set(std::move(s)), std::move(out)}; }

// Every sub-expression of a >1 expression, the expression itself included.
void subterms(const ExprP& e, std::vector<ExprP>& out) {
  out.push_back(e);
  for (const auto& k : e->kids) subterms(k, out);
}

// Same verdict on every poset over `alphabet` with at most n elements.
void same_language(const DGraph& a, const DGraph& b, const std::vector<std::string>& alphabet, int n) {
  for (const auto& p : enumerate_posets(alphabet, n)) {
    CAPTURE(p.text());
    CHECK(member_dgraph(a, p) == member_dgraph(b, p));
  }
}

}  // namespace

TEST_SUITE("dgraph") {
  TEST_CASE("graph of the branching expression") {
    DGraph d = build_rational(parse_expr(kBranching));
    REQUIRE(d.nodes.size() == 6);
    CHECK(d.root == 1);
    CHECK(d.at(1).label == NodeLabel::of_set(SemiLinear::points(2, {{1, 0}, {0, 1}})));
    CHECK(d.at(2).label == NodeLabel::of_op(Op::Seq1));
    REQUIRE(d.at(4).label.is_pres());
    CHECK(equal_on_box(d.at(4).label.set, SemiLinear::points(2, {{2, 0}, {1, 1}, {0, 2}}), 6));
    for (int id : {3, 5, 6}) CHECK(d.at(id).label.is_letter("a"));
    std::vector<std::pair<int, int>> special;
    for (const auto& [id, n] : d.nodes)
      for (const auto& o : n.out)
        if (o.special) special.push_back({id, o.to});
    CHECK(special == std::vector<std::pair<int, int>>{{4, 2}});
    CHECK(check_properties(d, {"x"}).all());

    std::string dot = to_dot(d);
    std::size_t dashed = 0;
    for (auto at = dot.find("dashed"); at != std::string::npos; at = dot.find("dashed", at + 1)) ++dashed;
    CHECK(dashed == 1);
    CHECK(dot.find("n4 -> n2 [label=\"1\", style=dashed]") != std::string::npos);
  }

  TEST_CASE("letter graph") {
    DGraph d = build(parse_expr("a"));
    REQUIRE(d.nodes.size() == 1);
    CHECK(d.at(d.root).label.is_letter("a"));
    CHECK(d.at(d.root).out.empty());
    auto j = to_json(d);
    CHECK(j["nodes"].size() == 1);
    CHECK(j["nodes"][0]["label"]["kind"] == "letter");
    CHECK(j["nodes"][0]["label"]["value"] == "a");
    CHECK_THROWS_AS(build(parse_expr("seq(a,b)")), ValidationFailed);
  }

  TEST_CASE("hand-built property violations") {
    DGraph pp;
    pp.root = 1;
    pp.nodes[1] = pres(SemiLinear::points(2, {{1, 1}}), {{2, false}, {3, false}});
    pp.nodes[2] = leaf("a");
    pp.nodes[3] = pres(SemiLinear::points(1, {{1}}), {{4, false}});
    pp.nodes[4] = leaf("b");
    auto r = check_properties(pp, {});
    CHECK_FALSE(r.pp);
    CHECK(r.ss);
    CHECK(r.dag);

    DGraph ss;
    ss.root = 1;
    ss.nodes[1] = pres(SemiLinear::points(2, {{1, 0}, {0, 1}}), {{2, false}, {3, false}});
    ss.nodes[2] = {NodeLabel::of_op(Op::Seq1), {{3, false}, {1, true}}};
    ss.nodes[3] = leaf("a");
    r = check_properties(ss, {});
    CHECK_FALSE(r.ss);
    CHECK(r.pp);
    CHECK(r.dag);

    DGraph cyc = ss;
    cyc.nodes[2].out[1].special = false;
    CHECK_FALSE(check_properties(cyc, {}).dag);

    DGraph arity;
    arity.root = 1;
    arity.nodes[1] = {NodeLabel::of_op(Op::Seq1), {{2, false}}};
    arity.nodes[2] = leaf("a");
    CHECK_FALSE(check_properties(arity, {}).arity);
  }

  TEST_CASE("series position of the bound letter") {
    CHECK(xi_series_check(build_rational(parse_expr("seq(a,x,b)")), "x"));
    CHECK_FALSE(xi_series_check(build_rational(parse_expr("par(a,x)")), "x"));
    CHECK(xi_series_check(build(parse_expr("x")), "x"));
    CHECK(xi_series_check(build_rational(parse_expr("or(par(a,x),seq(x,b))")), "x"));
    CHECK_FALSE(xi_series_check(build_rational(parse_expr("seq(a,par(x,x))")), "x"));
  }

  TEST_CASE("normalization merges bound-letter children") {
    DGraph d;
    d.root = 1;
    d.nodes[1] = pres(SemiLinear::points(3, {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}), {{2, false}, {3, false}, {4, false}});
    d.nodes[2] = leaf("x");
    d.nodes[3] = leaf("a");
    d.nodes[4] = leaf("x");
    CHECK_FALSE(check_properties(d, {"x"}).xi_normalized);
    DGraph n = xi_normalize(d, "x");
    int xs = 0;
    for (const auto& o : n.at(n.root).out) xs += n.at(o.to).label.is_letter("x");
    CHECK(xs == 1);
    CHECK(check_properties(n, {"x"}).xi_normalized);
    same_language(d, n, {"a", "x"}, 4);
    CHECK(xi_normalize(n, "x") == n);
  }

  TEST_CASE("PP suppression") {
    DGraph d;
    d.root = 1;
    d.nodes[1] = pres(SemiLinear::points(2, {{1, 1}, {2, 0}}), {{2, false}, {3, false}});
    d.nodes[2] = leaf("a");
    d.nodes[3] = pres(SemiLinear::points(2, {{1, 0}, {0, 2}}), {{4, false}, {5, false}});
    d.nodes[4] = leaf("b");
    d.nodes[5] = leaf("c");
    DGraph s = pp_suppress(d);
    CHECK(check_properties(s, {}).pp);
    // Paths are only defined on PP graphs, so the input's language is written out.
    std::set<SPTerm> want{parse_term("par(a,b)"), parse_term("par(a,a)"), parse_term("par(a,c,c)")};
    for (const auto& p : enumerate_posets({"a", "b", "c"}, 4)) {
      CAPTURE(p.text());
      CHECK(member_dgraph(s, p) == (want.count(p) > 0));
    }
    CHECK(pp_suppress(s) == s);

    DGraph chain = d;
    chain.nodes[3].out[0] = {6, false};
    chain.nodes[6] = pres(SemiLinear::points(1, {{1}}), {{4, false}});
    CHECK_THROWS_AS(pp_suppress(chain), PreconditionViolated);
  }

  TEST_CASE("substituted iteration set") {
    DGraph d = build_rational(parse_expr("istar(x,seq(b,par(a,star(x))))"));
    bool found = false;
    for (const auto& [id, n] : d.nodes)
      if (n.label.is_pres() && n.label.set.dim == 4)
        found = equal_on_box(n.label.set,
                             SemiLinear::points(4, {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}}), 4);
    CHECK(found);
    CHECK_FALSE(member_dgraph(d, parse_term("b")));
  }

  TEST_CASE("structural properties across the corpus") {
    for (const auto& text : builtin_corpus()) {
      CAPTURE(text);
      auto e = parse_expr(text);
      auto g = to_gt1(e);
      auto bs = binders(e);
      DGraph d = build(g);
      CHECK(check_properties(d, bs).all());
      CHECK(special_edges_gated(d));
      CHECK(root_accepts_empty(d) == nullable(e));
      for (const auto& [id, n] : d.nodes)
        for (const auto& o : n.out)
          if (o.special)
            for (const auto& x : bs) CHECK_FALSE(d.at(o.to).label.is_letter(x));
      CHECK(dgraph_from_json(to_json(d)) == d);
      CHECK(pp_suppress(d) == d);
      for (const auto& x : bs) CHECK(xi_normalize(d, x) == d);

      std::vector<ExprP> parts;
      subterms(g, parts);
      for (const auto& p : parts) {
        CAPTURE(to_text(p));
        DGraph s = build(p);
        CHECK(check_properties(s, binders(p)).all());
        CHECK(root_accepts_empty(s) == nullable(p));
      }
    }
  }
}
