// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "path_fuzz.hpp"
#include "spkit/coloring.hpp"
#include "spkit/crosscheck.hpp"
#include "spkit/dgraph.hpp"
#include "spkit/membership.hpp"
#include "spkit/pmso.hpp"
#include "spkit/rexpr.hpp"
#include "spkit/semilinear.hpp"

using namespace spkit;

namespace {

using Pts = std::set<Vec>;

struct Outcome {
  bool ok = true;
  std::string detail;
};

Pts on_box(const SemiLinear& s, int b) {
  Pts out;
  for (const auto& v : box_points(s.dim, b))
    if (member(s, v)) out.insert(v);
  return out;
}

Outcome semilinear_star() {
  Outcome o;
  SemiLinear rho = SemiLinear::points(2, {{1, 0}, {0, 2}});
  SemiLinear st = star_subst(rho, 2);
  for (const auto& v : box_points(2, 20))
    if (member(st, v) != (v[0] + v[1] >= 1)) {
      o.ok = false;
      o.detail += "star differs at " + vec_text(v) + "; ";
      break;
    }
  for (int j = 1; j <= 5; ++j) {
    Pts got = on_box(power_subst(rho, 2, j), 20), closed;
    long long cap = 1LL << j, half = 1LL << (j - 1);
    for (const auto& v : box_points(2, 20))
      if (v[0] + v[1] >= 1 && v[0] + v[1] <= cap && v[0] <= half) closed.insert(v);
    if (got != closed) {
      std::vector<Vec> missing;
      std::set_difference(closed.begin(), closed.end(), got.begin(), got.end(), std::back_inserter(missing));
      o.ok = false;
      o.detail += "power j=" + std::to_string(j) + ": " + std::to_string(missing.size()) +
                  " closed-form points not produced";
      if (!missing.empty()) o.detail += " (e.g. " + vec_text(missing.front()) + ")";
      o.detail += "; ";
    }
  }
  return o;
}

Outcome disjoint_substitution() {
  SemiLinear inner = SemiLinear::points(2, {{1, 0}, {0, 1}});
  SemiLinear outer = SemiLinear::points(3, {{1, 0, 1}, {1, 1, 0}, {1, 0, 0}});
  Pts got = on_box(subst_disjoint(inner, outer, 3), 6);
  Pts want{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}};
  if (got == want) return {};
  return {false, std::to_string(got.size()) + " points"};
}

SemiLinear random_set(std::mt19937& rng, int dim) {
  std::uniform_int_distribution<int> entry(0, 4), comps(1, 3), periods(0, 2);
  SemiLinear s = SemiLinear::empty(dim);
  for (int c = comps(rng); c > 0; --c) {
    LinearSet l;
    do {
      l.base.assign(dim, 0);
      for (auto& x : l.base) x = entry(rng);
    } while (std::all_of(l.base.begin(), l.base.end(), [](long long x) { return x == 0; }));
    for (int p = periods(rng); p > 0; --p) {
      Vec v(dim);
      for (auto& x : v) x = entry(rng);
      l.periods.push_back(v);
    }
    s.add(l);
  }
  return s;
}

Outcome star_vs_saturated_power() {
  Outcome o;
  std::mt19937 rng(2024);
  const int box = 12;
  for (int round = 0; round < 200; ++round) {
    int dim = 1 + static_cast<int>(rng() % 3);
    SemiLinear s = random_set(rng, dim);
    int i = 1 + static_cast<int>(rng() % dim);
    std::vector<Vec> prev = power_points(s, i, 0, box), cur;
    for (int j = 1;; ++j, prev = cur) {
      cur = power_points(s, i, j, box);
      if (cur == prev) break;
    }
    Pts sat(cur.begin(), cur.end());
    if (on_box(star_subst(s, i), box) != sat) {
      o.ok = false;
      o.detail = "differs on " + to_text(s) + " i=" + std::to_string(i);
      return o;
    }
  }
  o.detail = "200 sets";
  return o;
}

Outcome structure() {
  Outcome o;
  for (const auto& text : builtin_corpus()) {
    auto e = parse_expr(text);
    auto bs = binders(e);
    DGraph d = build_rational(e);
    bool special_into_binder = false;
    for (const auto& [id, n] : d.nodes)
      for (const auto& out : n.out)
        for (const auto& x : bs) special_into_binder = special_into_binder || (out.special && d.at(out.to).label.is_letter(x));
    std::string why;
    if (!check_properties(d, bs).all()) why = "properties";
    else if (special_into_binder) why = "special edge into bound letter";
    else if (root_accepts_empty(d) != nullable(e)) why = "root nullability";
    else if (!special_edges_gated(d)) why = "ungated special edge";
    if (!why.empty()) {
      o.ok = false;
      o.detail += text + ": " + why + "; ";
    }
  }
  if (o.ok) o.detail = std::to_string(builtin_corpus().size()) + " graphs";
  return o;
}

Outcome graph_vs_expression() {
  CrosscheckConfig cfg;
  cfg.corpus = builtin_corpus();
  cfg.max_size = 5;
  cfg.pmso_max_size = -1;
  auto r = crosscheck(cfg);
  Outcome o;
  o.detail = std::to_string(r.rows.size()) + " pairs";
  for (const auto& row : r.rows)
    if (row.by_expr != row.by_dgraph) {
      o.ok = false;
      o.detail = cfg.corpus[row.expression] + " on " + row.poset;
      break;
    }
  return o;
}

Outcome sentence_vs_expression() {
  CrosscheckConfig cfg;
  cfg.corpus = builtin_corpus();
  cfg.max_size = 4;
  cfg.pmso_max_size = 4;
  auto r = crosscheck(cfg);
  Outcome o;
  o.detail = std::to_string(r.pmso_checks) + " model checks";
  for (const auto& row : r.rows)
    if (!row.by_pmso || *row.by_pmso != row.by_expr) {
      o.ok = false;
      o.detail = cfg.corpus[row.expression] + " on " + row.poset;
      break;
    }
  return o;
}

Mask by_labels(const Poset& p, std::initializer_list<const char*> ls) { return p.mask_of({ls.begin(), ls.end()}); }

Outcome colorings() {
  Outcome o;
  auto fail = [&](const std::string& why) {
    if (o.ok) o.detail = why;
    o.ok = false;
  };
  std::mt19937 rng(72);
  auto posets = enumerate_posets({"a", "b"}, 6);
  posets.erase(posets.begin());
  int ms_rounds = 0, s_rounds = 0;
  for (int round = 0; round < 250; ++round, ++ms_rounds) {
    Poset p = to_poset(posets[rng() % posets.size()]);
    int colors = 1 + static_cast<int>(rng() % 3);
    std::map<Mask, Color> want;
    for (Mask f : ms_factors(p, p.all())) want[f] = static_cast<Color>(rng() % colors);
    MsEncoding enc = encode_ms(p, want, colors);
    for (const auto& [f, c] : want)
      if (ms_color_of(p, f, enc) != c) fail("ms round trip on " + p.term(p.all()).text());
  }
  for (int round = 0; round < 250; ++round, ++s_rounds) {
    Poset p = to_poset(posets[rng() % posets.size()]);
    SColoring c;
    c.colors = 1 + static_cast<int>(rng() % 3);
    auto seq = sequential_factors(p, p.all());
    std::shuffle(seq.begin(), seq.end(), rng);
    for (Mask f : seq) {
      if (rng() % 2) continue;
      c.color[f] = static_cast<Color>(rng() % c.colors);
      if (!is_compatible(p, c)) c.color.erase(f);
    }
    SEncoding enc = encode_s(p, c);
    for (const auto& [f, col] : c.color)
      if (s_color_of(p, f, enc) != col) fail("s round trip on " + p.term(p.all()).text());
  }

  Poset big = to_poset(parse_term(
      "seq(x1,par(seq(par(x2,x3),x4,par(seq(x5,x6),seq(x7,x8)),par(x9,x10,seq(x11,par(x12,x13))),"
      "par(x14,x15),x16),seq(par(x17,x18),par(x21,seq(par(x19,x20),par(x22,x23))),par(x24,x25))))"));
  Mask p1 = 0, p2 = 0;
  for (int i = 2; i <= 16; ++i) p1 |= big.mask_of({"x" + std::to_string(i)});
  for (int i = 17; i <= 25; ++i) p2 |= big.mask_of({"x" + std::to_string(i)});
  Mask p3 = by_labels(big, {"x19", "x20", "x22", "x23"});
  MsEncoding ms(2);
  ms.w[0] = by_labels(big, {"x4"});
  ms.s[1] = by_labels(big, {"x19", "x18"});
  ms.p[1] = by_labels(big, {"x22", "x23", "x21", "x19"});
  if (ms_color_of(big, p1, ms) != 0 || ms_color_of(big, p2, ms) != 1 || ms_color_of(big, p3, ms) != 1)
    fail("twenty-five element poset decodes wrongly");

  Poset q = to_poset(parse_term("seq(a,par(b,c),d,par(e,seq(par(g,h),par(i,j)),f))"));
  const Color red = 0, green = 1;
  SEncoding enc{2, {0, 0}, MsEncoding(4)};
  enc.v[green] = by_labels(q, {"a", "e"});
  enc.v[red] = by_labels(q, {"d"});
  enc.ms.w[2] = by_labels(q, {"b", "c"});
  enc.ms.w[1] = by_labels(q, {"e", "g", "h", "i", "j", "f"});
  enc.ms.s[1] = by_labels(q, {"h"});
  enc.ms.p[1] = by_labels(q, {"i", "j"});
  enc.ms.w[0] = by_labels(q, {"a"});
  Mask f1 = by_labels(q, {"a", "b", "c"});
  if (s_color_of(q, f1, enc) != green || s_color_of(q, q.all() & ~f1, enc) != red ||
      s_color_of(q, by_labels(q, {"g", "h", "i", "j"}), enc) != red || s_color_of(q, by_labels(q, {"e"}), enc) != green)
    fail("two-colour example decodes wrongly");

  if (o.ok) o.detail = std::to_string(ms_rounds) + " ms and " + std::to_string(s_rounds) + " s round trips";
  return o;
}

Outcome validation() {
  auto has = [](const std::vector<std::string>& v, const char* s) { return std::find(v.begin(), v.end(), s) != v.end(); };
  Outcome o;
  if (!has(validate(parse_expr("istar(x,seq(a,x,b))")), kXiComparable)) o = {false, "comparable bound letter accepted"};
  if (!has(validate(parse_expr("sub(x,or(eps,a),b)")), kEpsInSub)) o = {false, "nullable substituted operand accepted"};
  if (!validate(parse_expr("sub(x,a,istar(x,seq(a,par(x,x))))")).empty()) o = {false, "branching expression rejected"};
  return o;
}

Outcome witness_fuzz() {
  Outcome o;
  const auto& corpus = builtin_corpus();
  std::vector<DGraph> graphs;
  for (const auto& text : corpus) graphs.push_back(build_rational(parse_expr(text)));
  std::mt19937 rng(9);
  auto ws = fuzz::random_witnesses(corpus, graphs, 6, 1000, rng);
  if (ws.size() != 1000) return {false, "only " + std::to_string(ws.size()) + " witnesses found"};
  int accepted = 0, rejected = 0;
  for (const auto& w : ws) {
    if (verify_path(graphs[w.expression], w.poset, w.path)) ++accepted;
    auto [bad, field] = fuzz::mutate(w.path, w.poset.size(), rng);
    if (!verify_path(graphs[w.expression], w.poset, bad)) {
      ++rejected;
    } else if (o.ok) {
      o.ok = false;
      o.detail = "mutated " + field + " accepted for " + w.poset.text() + "; ";
    }
  }
  if (accepted != 1000) o.ok = false;
  o.detail += std::to_string(accepted) + " witnesses verified, " + std::to_string(rejected) + " mutations rejected";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {"star and power of the two-vector set", 1, semilinear_star},
      {"disjoint substitution", 1, disjoint_substitution},
      {"star equals saturated power", 60, star_vs_saturated_power},
      {"graph structure across the corpus", 30, structure},
      {"graph membership equals expression membership", 600, graph_vs_expression},
      {"sentence models equal expression membership", 1800, sentence_vs_expression},
      {"coloring round trips and decodings", 60, colorings},
      {"validation goldens", 1, validation},
      {"witness verification and mutation fuzz", 60, witness_fuzz},
  };
  int failed = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[k].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > all[k].budget_s) {
      o.ok = false;
      o.detail += " over time budget";
    }
    failed += !o.ok;
    std::ostringstream line;
    line.precision(3);
    line << "criterion " << k + 1 << ": " << (o.ok ? "PASS" : "FAIL") << "  " << all[k].name << " (" << secs
         << " s) " << o.detail;
    std::cout << line.str() << std::endl;
  }
  return failed ? 1 : 0;
}
