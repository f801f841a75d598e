// Quantifier-free linear constraints over N^dim and their conversion to
// semilinear sets.
#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include "spkit/semilinear.hpp"

namespace spkit {

namespace {

struct Lin {
  std::map<std::string, long long> coef;
  long long constant = 0;
};

struct Cond {
  enum class Kind { True, False, Cmp, Cong, And, Or, Not };
  Kind kind = Kind::True;
  std::string op;  // for Cmp
  Lin diff;        // lhs - rhs
  long long mod = 0;
  std::vector<std::unique_ptr<Cond>> kids;
};

struct Tok {
  enum class K { Id, Num, Sym, End } k;
  std::string s;
  std::size_t pos;
};

std::vector<Tok> lex(std::string_view t) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < t.size()) {
    char c = t[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_')) ++i;
      out.push_back({Tok::K::Id, std::string(t.substr(b, i - b)), b});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
      out.push_back({Tok::K::Num, std::string(t.substr(b, i - b)), b});
    } else {
      static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||", "->"};
      std::string sym(1, c);
      for (const char* w : two)
        if (t.substr(i, 2) == w) sym = w;
      i += sym.size();
      if (std::string("+-*()<>=!&|%").find(sym[0]) == std::string::npos)
        throw SyntaxError("unexpected character '" + sym + "'", b);
      out.push_back({Tok::K::Sym, sym, b});
    }
  }
  out.push_back({Tok::K::End, "", t.size()});
  return out;
}

struct CondParser {
  std::vector<Tok> toks;
  std::size_t i = 0;

  const Tok& peek() const { return toks[i]; }
  bool is(const std::string& s) const { return toks[i].k != Tok::K::End && toks[i].s == s; }
  bool accept(const std::string& s) {
    if (is(s)) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(const std::string& s) {
    if (!accept(s)) throw SyntaxError("expected '" + s + "'", peek().pos);
  }

  std::unique_ptr<Cond> node(Cond::Kind k) {
    auto c = std::make_unique<Cond>();
    c->kind = k;
    return c;
  }

  std::unique_ptr<Cond> parse_impl() {
    auto l = parse_or();
    if (accept("->")) {
      auto r = parse_impl();
      auto n = node(Cond::Kind::Not);
      n->kids.push_back(std::move(l));
      auto o = node(Cond::Kind::Or);
      o->kids.push_back(std::move(n));
      o->kids.push_back(std::move(r));
      return o;
    }
    return l;
  }
  std::unique_ptr<Cond> parse_or() {
    auto l = parse_and();
    while (is("or") || is("||") || is("|")) {
      ++i;
      auto o = node(Cond::Kind::Or);
      o->kids.push_back(std::move(l));
      o->kids.push_back(parse_and());
      l = std::move(o);
    }
    return l;
  }
  std::unique_ptr<Cond> parse_and() {
    auto l = parse_not();
    while (is("and") || is("&&") || is("&")) {
      ++i;
      auto o = node(Cond::Kind::And);
      o->kids.push_back(std::move(l));
      o->kids.push_back(parse_not());
      l = std::move(o);
    }
    return l;
  }
  std::unique_ptr<Cond> parse_not() {
    if (accept("not") || accept("!")) {
      auto n = node(Cond::Kind::Not);
      n->kids.push_back(parse_not());
      return n;
    }
    return parse_atom();
  }
  bool looks_boolean_paren() {
    // "(" starts a boolean group unless a comparison follows its match.
    int depth = 0;
    std::size_t j = i;
    for (; j < toks.size(); ++j) {
      if (toks[j].s == "(") ++depth;
      if (toks[j].s == ")" && --depth == 0) break;
    }
    if (j + 1 >= toks.size()) return true;
    static const std::set<std::string> rel{"=", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "%"};
    return !rel.count(toks[j + 1].s);
  }
  std::unique_ptr<Cond> parse_atom() {
    if (is("exists") || is("forall") || is("E") || is("A"))
      throw UnsupportedFormula("quantifiers are not supported");
    if (accept("true")) return node(Cond::Kind::True);
    if (accept("false")) return node(Cond::Kind::False);
    if (is("(") && looks_boolean_paren()) {
      ++i;
      auto c = parse_impl();
      expect(")");
      return c;
    }
    Lin lhs = parse_sum();
    long long mod_lhs = 0;
    if (accept("%")) {
      if (peek().k != Tok::K::Num) throw SyntaxError("expected modulus", peek().pos);
      mod_lhs = std::stoll(toks[i++].s);
    }
    std::string op = peek().s;
    static const std::set<std::string> rel{"=", "==", "!=", "<", "<=", ">", ">="};
    if (!rel.count(op)) throw SyntaxError("expected comparison", peek().pos);
    ++i;
    Lin rhs = parse_sum();
    auto c = node(Cond::Kind::Cmp);
    c->op = op == "==" ? "=" : op;
    c->diff = lhs;
    for (auto& [v, k] : rhs.coef) c->diff.coef[v] -= k;
    c->diff.constant -= rhs.constant;
    long long m = mod_lhs;
    if (accept("mod")) {
      if (peek().k != Tok::K::Num) throw SyntaxError("expected modulus", peek().pos);
      m = std::stoll(toks[i++].s);
    } else if (is("(") && i + 1 < toks.size() && toks[i + 1].s == "mod") {
      i += 2;
      if (peek().k != Tok::K::Num) throw SyntaxError("expected modulus", peek().pos);
      m = std::stoll(toks[i++].s);
      expect(")");
    }
    if (m) {
      if (c->op != "=") throw UnsupportedFormula("congruences must use '='");
      if (m <= 0) throw UnsupportedFormula("modulus must be positive");
      c->kind = Cond::Kind::Cong;
      c->mod = m;
    }
    return c;
  }
  Lin parse_sum() {
    Lin l;
    bool neg = false;
    if (accept("-")) neg = true;
    add_term(l, neg);
    while (is("+") || is("-")) {
      neg = toks[i++].s == "-";
      add_term(l, neg);
    }
    return l;
  }
  void add_term(Lin& l, bool neg) {
    long long k = 1;
    bool have_num = false;
    if (peek().k == Tok::K::Num) {
      k = std::stoll(toks[i++].s);
      have_num = true;
      accept("*");
    }
    if (peek().k == Tok::K::Id && !is("mod") && !is("and") && !is("or")) {
      std::string v = toks[i++].s;
      if (accept("*")) {
        if (peek().k == Tok::K::Id) throw UnsupportedFormula("non-linear term");
        if (peek().k != Tok::K::Num) throw SyntaxError("expected number", peek().pos);
        k *= std::stoll(toks[i++].s);
      }
      l.coef[v] += neg ? -k : k;
    } else if (have_num) {
      l.constant += neg ? -k : k;
    } else if (accept("(")) {
      Lin inner = parse_sum();
      expect(")");
      for (auto& [v, c] : inner.coef) l.coef[v] += neg ? -c : c;
      l.constant += neg ? -inner.constant : inner.constant;
    } else {
      throw SyntaxError("expected term", peek().pos);
    }
  }
};

void collect_vars(const Cond& c, std::set<std::string>& vars) {
  for (const auto& [v, k] : c.diff.coef)
    if (k != 0) vars.insert(v);
  for (const auto& kid : c.kids) collect_vars(*kid, vars);
}

void collect_scale(const Cond& c, long long& coef, long long& constant, long long& modulus) {
  for (const auto& [v, k] : c.diff.coef) coef = std::max(coef, std::llabs(k));
  constant = std::max(constant, std::llabs(c.diff.constant));
  modulus = std::max(modulus, c.mod);
  for (const auto& kid : c.kids) collect_scale(*kid, coef, constant, modulus);
}

struct Compiled {
  std::unique_ptr<Cond> root;
  std::map<std::string, int> index;  // variable -> coordinate (0-based)
  int dim = 0;

  bool eval(const Cond& c, const Vec& v) const {
    switch (c.kind) {
      case Cond::Kind::True:
        return true;
      case Cond::Kind::False:
        return false;
      case Cond::Kind::And:
        return eval(*c.kids[0], v) && eval(*c.kids[1], v);
      case Cond::Kind::Or:
        return eval(*c.kids[0], v) || eval(*c.kids[1], v);
      case Cond::Kind::Not:
        return !eval(*c.kids[0], v);
      default:
        break;
    }
    long long s = c.diff.constant;
    for (const auto& [name, k] : c.diff.coef) s += k * v[index.at(name)];
    if (c.kind == Cond::Kind::Cong) return ((s % c.mod) + c.mod) % c.mod == 0;
    if (c.op == "=") return s == 0;
    if (c.op == "!=") return s != 0;
    if (c.op == "<") return s < 0;
    if (c.op == "<=") return s <= 0;
    if (c.op == ">") return s > 0;
    return s >= 0;
  }
  bool eval(const Vec& v) const { return eval(*root, v); }
};

Compiled compile(std::string_view text, int dim) {
  CondParser p{lex(text)};
  Compiled c;
  c.root = p.parse_impl();
  if (p.peek().k != Tok::K::End) throw SyntaxError("trailing input", p.peek().pos);
  c.dim = dim;
  std::set<std::string> vars;
  collect_vars(*c.root, vars);
  bool indexed = std::all_of(vars.begin(), vars.end(), [](const std::string& v) {
    return v.size() > 1 && v[0] == 'x' &&
           std::all_of(v.begin() + 1, v.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
  });
  if (indexed) {
    for (const auto& v : vars) {
      int k = std::stoi(v.substr(1));
      if (k < 1 || k > dim) throw DimensionMismatch("variable " + v + " outside dimension " + std::to_string(dim));
      c.index[v] = k - 1;
    }
  } else {
    if (static_cast<int>(vars.size()) > dim)
      throw DimensionMismatch("more variables than the dimension");
    int k = 0;
    for (const auto& v : vars) c.index[v] = k++;
  }
  return c;
}

}  // namespace

bool eval_constraints(std::string_view text, int dim, const Vec& v) {
  Compiled c = compile(text, dim);
  if (static_cast<int>(v.size()) != dim) throw DimensionMismatch("point has wrong dimension");
  return c.eval(v);
}

// Greedy cover of the solution points inside an exploration box: the smallest
// uncovered point becomes a base, and candidate periods are added while every
// lattice point it generates inside the box still satisfies the formula.
SemiLinear from_constraints(std::string_view text, int dim, int box) {
  if (dim < 0) throw DimensionMismatch("negative dimension");
  Compiled c = compile(text, dim);
  if (dim == 0) return c.eval(Vec{}) ? SemiLinear::point({}) : SemiLinear::empty(0);

  long long coef = 1, constant = 0, modulus = 0;
  collect_scale(*c.root, coef, constant, modulus);
  long long K = std::clamp(std::max(coef, modulus), 1LL, dim <= 2 ? 6LL : dim == 3 ? 4LL : 2LL);
  long long L = std::max<long long>(2LL * box, 2 * (constant + K) + box);
  // Keep the exploration box to a few million points.
  while (L > box) {
    double pts = 1;
    for (int d = 0; d < dim; ++d) pts *= static_cast<double>(L + 1);
    if (pts <= 2e6) break;
    --L;
  }

  std::vector<std::size_t> stride(dim);
  std::size_t total = 1;
  for (int d = dim; d-- > 0;) {
    stride[d] = total;
    total *= static_cast<std::size_t>(L + 1);
  }
  std::vector<char> sat(total, 0);
  std::vector<Vec> sols;
  {
    Vec v(dim, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (c.eval(v)) {
        sat[idx] = 1;
        sols.push_back(v);
      }
      for (int d = dim; d-- > 0;) {
        if (++v[d] <= L) break;
        v[d] = 0;
      }
    }
  }
  auto inside = [&](const Vec& v) {
    return std::all_of(v.begin(), v.end(), [&](long long x) { return x >= 0 && x <= L; });
  };
  auto at = [&](const Vec& v) {
    std::size_t idx = 0;
    for (int d = 0; d < dim; ++d) idx += static_cast<std::size_t>(v[d]) * stride[d];
    return sat[idx] != 0;
  };

  std::vector<Vec> cands;
  for (const auto& v : box_points(dim, static_cast<int>(K)))
    if (std::any_of(v.begin(), v.end(), [](long long x) { return x != 0; })) cands.push_back(v);
  std::sort(cands.begin(), cands.end(), [](const Vec& a, const Vec& b) {
    long long sa = std::accumulate(a.begin(), a.end(), 0LL), sb = std::accumulate(b.begin(), b.end(), 0LL);
    return sa != sb ? sa < sb : a < b;
  });
  std::sort(sols.begin(), sols.end(), [](const Vec& a, const Vec& b) {
    long long sa = std::accumulate(a.begin(), a.end(), 0LL), sb = std::accumulate(b.begin(), b.end(), 0LL);
    return sa != sb ? sa < sb : a < b;
  });

  // Every point base + sum(c_p p) inside the box satisfies the formula.
  std::vector<int> stamp(total, 0);
  int generation = 0;
  auto closed = [&](const Vec& base, const std::vector<Vec>& periods) {
    ++generation;
    std::vector<Vec> stack{base};
    auto idx_of = [&](const Vec& v) {
      std::size_t idx = 0;
      for (int d = 0; d < dim; ++d) idx += static_cast<std::size_t>(v[d]) * stride[d];
      return idx;
    };
    stamp[idx_of(base)] = generation;
    while (!stack.empty()) {
      Vec v = stack.back();
      stack.pop_back();
      if (!at(v)) return false;
      for (const auto& p : periods) {
        Vec w = v;
        for (int d = 0; d < dim; ++d) w[d] += p[d];
        if (!inside(w)) continue;
        std::size_t id = idx_of(w);
        if (stamp[id] != generation) {
          stamp[id] = generation;
          stack.push_back(std::move(w));
        }
      }
    }
    return true;
  };

  SemiLinear out = SemiLinear::empty(dim);
  for (const auto& v : sols) {
    if (member(out, v)) continue;
    std::vector<Vec> periods;
    for (const auto& p : cands) {
      Vec twice = v;
      for (int d = 0; d < dim; ++d) twice[d] += 2 * p[d];
      if (!inside(twice)) continue;
      if (!periods.empty()) {
        bool generated = false;
        try {
          generated = member(SemiLinear{dim, {LinearSet{Vec(dim, 0), periods}}}, p);
        } catch (const ResourceBound&) {
        }
        if (generated) continue;
      }
      periods.push_back(p);
      if (!closed(v, periods)) periods.pop_back();
    }
    out.add({v, periods});
  }
  out = simplify(out);

  for (const auto& v : box_points(dim, box))
    if (member(out, v) != c.eval(v))
      throw VerificationFailed("constructed set disagrees with the formula at " + vec_text(v));
  return out;
}

}  // namespace spkit
