#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "spkit/cli.hpp"
#include "spkit/dgraph.hpp"

using namespace spkit;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"spkit"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return "/tmp/spkit_cli_test_" + name; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("membership through each decider") {
    const char* e1 = "sub(x, a, istar(x, seq(a, par(x,x))))";
    for (const char* via : {"expr", "dgraph", "pmso"}) {
      CAPTURE(via);
      auto yes = run({"member", "-e", e1, "-p", "seq(a,par(a,a))", "--via", via});
      CHECK(yes.code == 0);
      CHECK(yes.out == "true\n");
      auto no = run({"member", "-e", e1, "-p", "seq(a,a)", "--via", via});
      CHECK(no.code == 1);
      CHECK(no.out == "false\n");
    }
    auto w = run({"member", "-e", e1, "-p", "seq(a,par(a,a))", "--via", "dgraph", "--witness"});
    CHECK(w.code == 0);
    CHECK(w.out.find("\"node\"") != std::string::npos);
    // A relation given as json.
    auto rel = run({"member", "-e", "seq(a,b)", "-p",
                    R"({"elements":["u","v"],"order":[["u","v"]],"labels":{"u":"a","v":"b"}})"});
    CHECK(rel.code == 0);
  }

  TEST_CASE("validation and syntax errors exit with 2") {
    auto bad = run({"member", "-e", "istar(x, seq(a, x, b))", "-p", "a"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("ξ comparable in *ξ operand") != std::string::npos);
    CHECK(run({"member", "-e", "sub(x,eps,a)", "-p", "a", "--via", "dgraph"}).code == 2);
    CHECK(run({"member", "-e", "seq(a,", "-p", "a"}).code == 2);
    CHECK(run({"member", "-e", "a", "-p", "seq(a"}).code == 2);
    CHECK(run({"member", "-e", "a", "-p", "a", "--via", "automaton"}).code == 2);
    CHECK(run({"parse", "-f", "a(x) &"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("rewriting, graphs, formulas") {
    auto g = run({"gt1", "-e", "star(a)"});
    CHECK(g.code == 0);
    CHECK(g.out == "or(star1(a),a,eps)\n");
    CHECK(run({"parse", "-e", "seq( a , par(b,a))"}).out == "seq(a,par(b,a))\n");
    CHECK(run({"parse", "-p", "par(b,a)"}).out == "par(a,b)\n");
    CHECK(run({"parse", "-f", "(a(x))"}).out == "a(x)\n");

    auto dot = run({"dgraph", "-e", "star(a)"});
    CHECK(dot.code == 0);
    CHECK(dot.out.rfind("digraph", 0) == 0);
    auto js = run({"dgraph", "-e", "star(a)", "--json"});
    CHECK(nlohmann::json::parse(js.out).contains("nodes"));

    auto phi = run({"pmso", "-e", "a"});
    CHECK(phi.code == 0);
    CHECK(phi.out == "exists R (existscol S [] (forall y (y in R) & scoloring(R,S) & (size(R,1) & "
                     "forall x (x in R -> a(x)))))\n");
    auto nullable = run({"pmso", "-e", "or(a,eps)"});
    CHECK(nullable.out.find("| forall X (forall y (y in X) -> size(X,0))") != std::string::npos);
    CHECK(run({"pmso", "-f", "exists x (a(x))", "-p", "a"}).code == 0);
    CHECK(run({"pmso", "-f", "exists x (a(x))", "-p", "b"}).code == 1);
    CHECK(run({"pmso", "-f", "true", "-p", "seq(a,a,a,a,a,a,a,a,a)"}).code == 2);
  }

  TEST_CASE("a graph breaking its invariants exits with 3") {
    DGraph d;
    d.root = 1;
    d.nodes[1] = DNode{NodeLabel::of_set(SemiLinear::unit(1, 1)), {OutEdge{2, false}}};
    d.nodes[2] = DNode{NodeLabel::of_set(SemiLinear::unit(1, 1)), {OutEdge{3, false}}};
    d.nodes[3] = DNode{NodeLabel::of_letter("a"), {}};
    std::string path = temp_path("pp.json");
    std::ofstream(path) << to_json(d).dump();
    auto r = run({"dgraph", "-g", path.c_str()});
    CHECK(r.code == 3);
    CHECK(r.err.find("PP") != std::string::npos);

    std::string good = temp_path("good.json");
    std::ofstream(good) << run({"dgraph", "-e", "star(a)", "--json"}).out;
    CHECK(run({"dgraph", "-g", good.c_str()}).code == 0);
    std::remove(path.c_str());
    std::remove(good.c_str());
  }

  TEST_CASE("enumeration") {
    CHECK(run({"enum", "-e", "diamond(b)", "-n", "3"}).out == "eps\nb\nseq(b,b)\nseq(b,b,b)\n");
    CHECK(run({"enum", "-a", "a", "-n", "2"}).out == "eps\na\npar(a,a)\nseq(a,a)\n");
    CHECK(run({"enum", "-n", "2"}).code == 2);
  }

  TEST_CASE("semilinear operations") {
    CHECK(run({"semilinear", "from", "-c", "x1+x2=2", "-d", "2"}).out ==
          "sl<2>{lin((0,2);), lin((1,1);), lin((2,0);)}\n");
    CHECK(run({"semilinear", "member", "-s", "sl<2>{lin((1,0);(0,1))}", "-v", "1,5"}).code == 0);
    CHECK(run({"semilinear", "member", "-s", "sl<2>{lin((1,0);(0,1))}", "-v", "0,5"}).code == 1);
    CHECK(run({"semilinear", "member", "-s", "sl<2>{lin((1,0);(0,1))}", "-v", "5"}).code == 2);
    auto sub = run({"semilinear", "subst", "-s", "sl<2>{lin((1,0);), lin((1,1);)}", "-t",
                    "sl<3>{lin((1,0,0);), lin((1,1,0);), lin((1,0,1);)}", "-i", "2"});
    CHECK(sub.code == 0);
    CHECK(run({"semilinear", "equal", "-s", "sl<1>{lin((1);(1))}", "-t", "sl<1>{lin((1);), lin((2);(1))}"}).code ==
          0);
    CHECK(run({"semilinear", "star", "-s", "sl<2>{lin((1,0);), lin((0,2);)}", "-i", "2"}).code == 0);
    CHECK(run({"semilinear", "bogus"}).code == 2);
    CHECK(run({"semilinear", "show"}).code == 2);
  }

  TEST_CASE("crosscheck") {
    std::string report = temp_path("report.json");
    auto r = run({"crosscheck", "-c", "builtin", "-n", "3", "-o", report.c_str()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("20 expressions", 0) == 0);
    std::ifstream in(report);
    auto j = nlohmann::json::parse(in);
    CHECK(j["agree"] == true);
    CHECK(j["max_size"] == 3);

    std::string empty = temp_path("empty.txt");
    std::ofstream(empty) << "# nothing here\n";
    auto e = run({"crosscheck", "-c", empty.c_str(), "-n", "3"});
    CHECK(e.code == 0);
    CHECK(e.out.rfind("0 expressions, 0 pairs", 0) == 0);
    CHECK(run({"crosscheck", "-c", temp_path("missing.txt").c_str()}).code == 2);

    // Identical inputs give identical reports.
    std::string again = temp_path("report2.json");
    run({"crosscheck", "-c", "builtin", "-n", "3", "--serial", "-o", again.c_str()});
    std::ifstream a(report), b(again);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    for (const auto& f : {report, empty, again}) std::remove(f.c_str());
  }
}
