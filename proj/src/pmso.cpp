#include "spkit/pmso.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <set>

namespace spkit {

using K = Formula::Kind;

bool Formula::operator==(const Formula& o) const {
  if (kind != o.kind || letter != o.letter || vars != o.vars || number != o.number || mode != o.mode ||
      eps1 != o.eps1 || eps2 != o.eps2 || edge != o.edge || edges != o.edges || kids.size() != o.kids.size())
    return false;
  if (kind == K::Q && !(set.dim == o.set.dim && simplify(set) == simplify(o.set))) return false;
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (!(*kids[i] == *o.kids[i])) return false;
  return true;
}

bool formula_equal(const FormulaP& a, const FormulaP& b) { return *a == *b; }

namespace fm {
namespace {
std::shared_ptr<Formula> node(K k, std::vector<std::string> vars = {}, std::vector<FormulaP> kids = {}) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->vars = std::move(vars);
  f->kids = std::move(kids);
  return f;
}
}  // namespace

FormulaP truth(bool v) { return node(v ? K::True : K::False); }
FormulaP letter(std::string a, std::string x) {
  auto f = node(K::Letter, {std::move(x)});
  f->letter = std::move(a);
  return f;
}
FormulaP in(std::string x, std::string X) { return node(K::In, {std::move(x), std::move(X)}); }
FormulaP less(std::string x, std::string y) { return node(K::Less, {std::move(x), std::move(y)}); }
FormulaP not_(FormulaP f) { return node(K::Not, {}, {std::move(f)}); }
FormulaP and_(std::vector<FormulaP> fs) {
  if (fs.empty()) return truth(true);
  if (fs.size() == 1) return fs[0];
  return node(K::And, {}, std::move(fs));
}
FormulaP or_(std::vector<FormulaP> fs) {
  if (fs.empty()) return truth(false);
  if (fs.size() == 1) return fs[0];
  return node(K::Or, {}, std::move(fs));
}
FormulaP implies(FormulaP a, FormulaP b) { return node(K::Implies, {}, {std::move(a), std::move(b)}); }
static bool is_set_var(const std::string& v) { return !v.empty() && std::isupper(static_cast<unsigned char>(v[0])); }
FormulaP exists(std::string v, FormulaP body) {
  K k = is_set_var(v) ? K::ExistsSO : K::ExistsFO;
  return node(k, {std::move(v)}, {std::move(body)});
}
FormulaP forall(std::string v, FormulaP body) {
  K k = is_set_var(v) ? K::ForallSO : K::ForallFO;
  return node(k, {std::move(v)}, {std::move(body)});
}
FormulaP q(std::string z, std::vector<FormulaP> psis, SemiLinear s) {
  if (s.dim != static_cast<int>(psis.size())) throw DimensionMismatch("Q set dimension differs from its formula count");
  auto f = node(K::Q, {std::move(z)}, std::move(psis));
  f->set = std::move(s);
  return f;
}
FormulaP seqsum(std::string x, std::string y, std::string z) {
  return node(K::SeqSum, {std::move(x), std::move(y), std::move(z)});
}
FormulaP iter(std::string x, std::string y, Formula::Mode m, bool eps, FormulaP f) {
  auto r = node(K::Iter, {std::move(x), std::move(y)}, {std::move(f)});
  r->mode = m;
  r->eps1 = eps;
  return r;
}
FormulaP dia(std::string x, std::string y, bool g_eps, bool h_eps, FormulaP g, FormulaP h) {
  auto r = node(K::Dia, {std::move(x), std::move(y)}, {std::move(g), std::move(h)});
  r->eps1 = g_eps;
  r->eps2 = h_eps;
  return r;
}
FormulaP factor(std::string f, std::string r, bool sequential) {
  return node(sequential ? K::SeqFactor : K::Factor, {std::move(f), std::move(r)});
}
FormulaP color(std::string f, std::string s, int b, SpecialEdge e) {
  auto r = node(K::Color, {std::move(f), std::move(s)});
  r->number = b;
  r->edge = e;
  return r;
}
FormulaP scoloring(std::string r, std::string s) { return node(K::SColoring, {std::move(r), std::move(s)}); }
FormulaP size(std::string x, int n) {
  auto r = node(K::Size, {std::move(x)});
  r->number = n;
  return r;
}
FormulaP exists_coloring(std::string s, std::vector<SpecialEdge> edges, FormulaP body) {
  auto r = node(K::ExistsColoring, {std::move(s)}, {std::move(body)});
  r->edges = std::move(edges);
  return r;
}
}  // namespace fm

// ---------------------------------------------------------------------------
// Text

namespace {

const char* mode_name(Formula::Mode m) {
  switch (m) {
    case Formula::Mode::Star: return "star";
    case Formula::Mode::Omega: return "omega";
    case Formula::Mode::MOmega: return "momega";
  }
  return "?";
}

int level(const Formula& f) {
  switch (f.kind) {
    case K::Implies: return 1;
    case K::Or: return 2;
    case K::And: return 3;
    default: return 4;
  }
}

std::string join_vars(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::string print_at(const Formula& f, int ctx);

std::string print_body(const Formula& f) {
  const auto& v = f.vars;
  auto kid = [&](std::size_t i, int ctx) { return print_at(*f.kids[i], ctx); };
  switch (f.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Letter: return f.letter + "(" + v[0] + ")";
    case K::In: return v[0] + " in " + v[1];
    case K::Less: return v[0] + " < " + v[1];
    case K::Not: return "~" + kid(0, 4);
    case K::And:
    case K::Or: {
      std::string s;
      for (std::size_t i = 0; i < f.kids.size(); ++i)
        s += (i ? (f.kind == K::And ? " & " : " | ") : "") + kid(i, f.kind == K::And ? 4 : 3);
      return s;
    }
    case K::Implies: return kid(0, 2) + " -> " + kid(1, 1);
    case K::ExistsFO:
    case K::ExistsSO: return "exists " + v[0] + " (" + kid(0, 0) + ")";
    case K::ForallFO:
    case K::ForallSO: return "forall " + v[0] + " (" + kid(0, 0) + ")";
    case K::Q: {
      std::string s = "Q(" + v[0] + ";";
      for (std::size_t i = 0; i < f.kids.size(); ++i) s += (i ? ", " : " ") + kid(i, 0);
      return s + "; " + to_text(f.set) + ")";
    }
    case K::SeqSum: return "seqsum(" + join_vars(v) + ")";
    case K::Iter:
      return "iter(" + join_vars(v) + "," + mode_name(f.mode) + "," + (f.eps1 ? "1" : "0") + "; " + kid(0, 0) + ")";
    case K::Dia:
      return "dia(" + join_vars(v) + "," + (f.eps1 ? "1" : "0") + "," + (f.eps2 ? "1" : "0") + "; " + kid(0, 0) +
             "; " + kid(1, 0) + ")";
    case K::Factor: return "factor(" + join_vars(v) + ")";
    case K::SeqFactor: return "seqfactor(" + join_vars(v) + ")";
    case K::Color: return "col(" + join_vars(v) + "," + std::to_string(f.number) + "," + edge_text(f.edge) + ")";
    case K::SColoring: return "scoloring(" + join_vars(v) + ")";
    case K::Size: return "size(" + v[0] + "," + std::to_string(f.number) + ")";
    case K::ExistsColoring: {
      std::string s = "existscol " + v[0] + " [";
      for (std::size_t i = 0; i < f.edges.size(); ++i) s += (i ? ", " : "") + edge_text(f.edges[i]);
      return s + "] (" + kid(0, 0) + ")";
    }
  }
  return "?";
}

std::string print_at(const Formula& f, int ctx) {
  std::string s = print_body(f);
  return level(f) < ctx ? "(" + s + ")" : s;
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view s) : s_(s) {}

  FormulaP parse() {
    FormulaP f = formula();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    return f;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, i_); }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool at(std::string_view t) {
    skip();
    return s_.substr(i_, t.size()) == t;
  }
  bool eat(std::string_view t) {
    if (!at(t)) return false;
    i_ += t.size();
    return true;
  }
  void expect(std::string_view t) {
    if (!eat(t)) fail("expected '" + std::string(t) + "'");
  }
  std::string ident() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (b == i_ || !std::isalpha(static_cast<unsigned char>(s_[b]))) {
      i_ = b;
      fail("expected a name");
    }
    return std::string(s_.substr(b, i_ - b));
  }
  int integer() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (b == i_) fail("expected a number");
    return std::stoi(std::string(s_.substr(b, i_ - b)));
  }
  bool flag() {
    int v = integer();
    if (v != 0 && v != 1) fail("expected 0 or 1");
    return v == 1;
  }
  SpecialEdge edge() {
    SpecialEdge e;
    expect("n");
    e.from = integer();
    expect("->");
    expect("n");
    e.to = integer();
    return e;
  }

  FormulaP formula() {
    FormulaP a = disjunction();
    if (eat("->")) return fm::implies(a, formula());
    return a;
  }
  FormulaP disjunction() {
    std::vector<FormulaP> fs{conjunction()};
    while (eat("|")) fs.push_back(conjunction());
    return fs.size() == 1 ? fs[0] : fm::or_(fs);
  }
  FormulaP conjunction() {
    std::vector<FormulaP> fs{unary()};
    while (eat("&")) fs.push_back(unary());
    return fs.size() == 1 ? fs[0] : fm::and_(fs);
  }
  FormulaP unary() {
    if (eat("~")) return fm::not_(unary());
    if (eat("(")) {
      FormulaP f = formula();
      expect(")");
      return f;
    }
    return atom();
  }

  FormulaP body() {
    expect("(");
    FormulaP f = formula();
    expect(")");
    return f;
  }

  SemiLinear set_text(int dim) {
    skip();
    std::size_t b = i_;
    int depth = 0;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '(' || c == '{') ++depth;
      if (c == ')' || c == '}') {
        if (depth == 0) break;
        --depth;
      }
      ++i_;
    }
    std::string t(s_.substr(b, i_ - b));
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    try {
      SemiLinear s = t.rfind("sl", 0) == 0 ? parse_semilinear(t) : from_constraints(t, dim);
      if (s.dim != dim) throw DimensionMismatch("Q set dimension differs from its formula count");
      return s;
    } catch (const SyntaxError& e) {
      throw SyntaxError(std::string("bad Q set: ") + e.what(), b);
    }
  }

  FormulaP atom() {
    std::size_t start = (skip(), i_);
    std::string name = ident();
    if (name == "true") return fm::truth(true);
    if (name == "false") return fm::truth(false);
    if (name == "exists" || name == "forall") {
      std::string v = ident();
      FormulaP b = body();
      return name == "exists" ? fm::exists(v, b) : fm::forall(v, b);
    }
    if (name == "existscol") {
      std::string v = ident();
      expect("[");
      std::vector<SpecialEdge> es;
      if (!at("]")) {
        es.push_back(edge());
        while (eat(",")) es.push_back(edge());
      }
      expect("]");
      return fm::exists_coloring(v, es, body());
    }
    if (name == "Q") {
      expect("(");
      std::string z = ident();
      expect(";");
      std::vector<FormulaP> psis;
      if (!at(";")) {
        psis.push_back(formula());
        while (eat(",")) psis.push_back(formula());
      }
      expect(";");
      SemiLinear s = set_text(static_cast<int>(psis.size()));
      expect(")");
      return fm::q(z, psis, s);
    }
    auto vars = [&](int n) {
      std::vector<std::string> v;
      for (int k = 0; k < n; ++k) {
        if (k) expect(",");
        v.push_back(ident());
      }
      return v;
    };
    if (name == "seqsum") {
      expect("(");
      auto v = vars(3);
      expect(")");
      return fm::seqsum(v[0], v[1], v[2]);
    }
    if (name == "factor" || name == "seqfactor" || name == "scoloring") {
      expect("(");
      auto v = vars(2);
      expect(")");
      return name == "scoloring" ? fm::scoloring(v[0], v[1]) : fm::factor(v[0], v[1], name == "seqfactor");
    }
    if (name == "size") {
      expect("(");
      std::string v = ident();
      expect(",");
      int n = integer();
      expect(")");
      return fm::size(v, n);
    }
    if (name == "col") {
      expect("(");
      auto v = vars(2);
      expect(",");
      int b = integer();
      expect(",");
      SpecialEdge e = edge();
      expect(")");
      return fm::color(v[0], v[1], b, e);
    }
    if (name == "iter") {
      expect("(");
      auto v = vars(2);
      expect(",");
      std::string m = ident();
      Formula::Mode mode = m == "star" ? Formula::Mode::Star
                           : m == "omega" ? Formula::Mode::Omega
                           : m == "momega" ? Formula::Mode::MOmega
                                           : (fail("unknown iteration mode '" + m + "'"), Formula::Mode::Star);
      expect(",");
      bool e = flag();
      expect(";");
      FormulaP f = formula();
      expect(")");
      return fm::iter(v[0], v[1], mode, e, f);
    }
    if (name == "dia") {
      expect("(");
      auto v = vars(2);
      expect(",");
      bool g = flag();
      expect(",");
      bool h = flag();
      expect(";");
      FormulaP a = formula();
      expect(";");
      FormulaP b = formula();
      expect(")");
      return fm::dia(v[0], v[1], g, h, a, b);
    }
    if (eat("(")) {
      std::string x = ident();
      expect(")");
      return fm::letter(name, x);
    }
    if (at("in")) {
      std::size_t save = i_;
      ident();
      if (!at("(")) return fm::in(name, ident());
      i_ = save;
    }
    if (eat("<")) return fm::less(name, ident());
    i_ = start;
    fail("expected an atomic formula");
  }
};

}  // namespace

std::string print_formula(const FormulaP& f) { return print_at(*f, 0); }

FormulaP parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

nlohmann::json to_json(const FormulaP& f) {
  static const char* names[] = {"true",    "false",    "letter",   "in",        "less",   "not",
                                "and",     "or",       "implies",  "exists",    "forall", "exists",
                                "forall",  "q",        "seqsum",   "iter",      "dia",    "factor",
                                "seqfactor", "color",  "scoloring", "size",     "existscol"};
  nlohmann::json j;
  j["kind"] = names[static_cast<int>(f->kind)];
  if (!f->vars.empty()) j["vars"] = f->vars;
  switch (f->kind) {
    case K::Letter: j["letter"] = f->letter; break;
    case K::Q: j["set"] = to_json(f->set); break;
    case K::Size: j["size"] = f->number; break;
    case K::Iter: j["mode"] = mode_name(f->mode); j["eps"] = f->eps1; break;
    case K::Dia: j["eps"] = {f->eps1, f->eps2}; break;
    case K::Color: j["bool"] = f->number; j["edge"] = edge_text(f->edge); break;
    case K::ExistsColoring: {
      nlohmann::json es = nlohmann::json::array();
      for (const auto& e : f->edges) es.push_back(edge_text(e));
      j["edges"] = es;
      break;
    }
    default: break;
  }
  if (!f->kids.empty()) {
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : f->kids) ks.push_back(to_json(k));
    j["kids"] = ks;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Model checking

int max_model_size() {
  if (const char* v = std::getenv("SPKIT_MAX_POSET_SIZE")) {
    int n = std::atoi(v);
    if (n > 0) return std::min(n, kMaxElements);
  }
  return 8;
}

namespace {

template <class F>
bool any_submask(Mask u, F&& f) {
  Mask s = u;
  while (true) {
    if (f(s)) return true;
    if (s == 0) return false;
    s = (s - 1) & u;
  }
}

// Conjuncts that must hold whenever f holds: looks through conjunctions and
// existential quantifiers.
void forced(const FormulaP& f, std::vector<const Formula*>& out) {
  switch (f->kind) {
    case K::And:
      for (const auto& k : f->kids) forced(k, out);
      return;
    case K::ExistsSO:
    case K::ExistsFO:
    case K::ExistsColoring:
      forced(f->kids[0], out);
      return;
    default:
      out.push_back(f.get());
  }
}

bool is_whole(const Formula& f, const std::string& v) {
  return f.kind == K::ForallFO && f.kids[0]->kind == K::In && f.kids[0]->vars[0] == f.vars[0] &&
         f.kids[0]->vars[1] == v;
}

class Checker {
 public:
  explicit Checker(const Poset& p) : p_(p) {}

  bool eval(const Formula& f, Assignment& a, Mask u) {
    const auto& v = f.vars;
    switch (f.kind) {
      case K::True: return true;
      case K::False: return false;
      case K::Letter: return p_.label[elem(a, v[0])] == f.letter;
      case K::In: return (set(a, v[1]) >> elem(a, v[0])) & 1;
      case K::Less: return p_.less(elem(a, v[0]), elem(a, v[1]));
      case K::Not: return !eval(*f.kids[0], a, u);
      case K::And:
        for (const auto& k : f.kids)
          if (!eval(*k, a, u)) return false;
        return true;
      case K::Or:
        for (const auto& k : f.kids)
          if (eval(*k, a, u)) return true;
        return false;
      case K::Implies: return !eval(*f.kids[0], a, u) || eval(*f.kids[1], a, u);
      case K::ExistsFO:
      case K::ForallFO: {
        bool want = f.kind == K::ExistsFO;
        bool found = false;
        Scoped<int> bind(a.elems, v[0]);
        for_each_bit(u, [&](int x) {
          if (found) return;
          bind.set(x);
          if (eval(*f.kids[0], a, u) == want) found = true;
        });
        return found == want;
      }
      case K::ExistsSO:
      case K::ForallSO: return quantify_set(f, a, u);
      case K::Q: return eval_q(f, a, u);
      case K::SeqSum: {
        Mask x = set(a, v[0]), y = set(a, v[1]), z = set(a, v[2]);
        if (!y || !z || (y & z) || (y | z) != x) return false;
        bool ok = true;
        for_each_bit(y, [&](int i) { ok = ok && (p_.above[i] & z) == z; });
        return ok;
      }
      case K::Iter: return eval_iter(f, a, u);
      case K::Dia: return eval_dia(f, a, u);
      case K::Factor:
      case K::SeqFactor: {
        Mask x = set(a, v[0]), r = set(a, v[1]);
        if (!p_.is_factor(r, x)) return false;
        return f.kind == K::Factor || p_.is_sequential(x);
      }
      case K::Color: {
        Mask x = set(a, v[0]);
        const ColoringValue& c = coloring(a, v[1]);
        if (probe_ && (x & ~probe_)) escaped_ = true;
        auto pos = std::find(c.edges.begin(), c.edges.end(), f.edge);
        if (pos == c.edges.end()) return false;
        auto it = c.coloring.color.find(x);
        return it != c.coloring.color.end() && it->second == 2 * static_cast<int>(pos - c.edges.begin()) + f.number;
      }
      case K::SColoring: {
        Mask r = set(a, v[0]);
        const ColoringValue& c = coloring(a, v[1]);
        SColoring inside{c.coloring.colors, {}, {}};
        for (const auto& [m, col] : c.coloring.color)
          if ((m & ~r) == 0) inside.color[m] = col;
        return is_compatible(p_, inside);
      }
      case K::Size: return popcount(set(a, v[0])) == f.number;
      case K::ExistsColoring: return exists_coloring(f, a, u);
    }
    return false;
  }

 private:
  const Poset& p_;
  Mask probe_ = 0;
  bool escaped_ = false;

  // Binds a name for the lifetime of the object, restoring any outer binding.
  template <class T>
  struct Scoped {
    std::map<std::string, T>& m;
    std::string name;
    std::optional<T> old;
    Scoped(std::map<std::string, T>& mm, const std::string& n) : m(mm), name(n) {
      if (auto it = m.find(n); it != m.end()) old = it->second;
    }
    void set(T v) { m[name] = std::move(v); }
    ~Scoped() {
      if (old)
        m[name] = *old;
      else
        m.erase(name);
    }
  };

  int elem(const Assignment& a, const std::string& v) const {
    auto it = a.elems.find(v);
    if (it == a.elems.end()) throw UnboundVariable("unbound element variable " + v);
    return it->second;
  }
  Mask set(const Assignment& a, const std::string& v) const {
    auto it = a.sets.find(v);
    if (it == a.sets.end()) throw UnboundVariable("unbound set variable " + v);
    return it->second;
  }
  const ColoringValue& coloring(const Assignment& a, const std::string& v) const {
    auto it = a.colorings.find(v);
    if (it == a.colorings.end()) throw UnboundVariable("unbound coloring variable " + v);
    return it->second;
  }

  // Values of a set variable worth trying. A forced conjunct can pin it down;
  // skipped values would make the body false (or, under forall, the
  // implication's premise false).
  std::vector<Mask> candidates(const Formula& f, const Assignment& a, Mask u) {
    const std::string& var = f.vars[0];
    std::vector<const Formula*> cons;
    bool universal = f.kind == K::ForallSO;
    if (universal) {
      if (f.kids[0]->kind != K::Implies) return all_submasks(u);
      forced(f.kids[0]->kids[0], cons);
    } else {
      forced(f.kids[0], cons);
    }
    for (const Formula* c : cons) {
      if (is_whole(*c, var)) return {u};
      if (c->kind == K::SeqSum && c->vars[0] != var && a.sets.count(c->vars[0])) {
        Mask x = a.sets.at(c->vars[0]);
        if (c->vars[1] == var) {
          std::vector<Mask> out;
          if (!p_.is_sequential(x)) return out;
          Mask run = 0;
          auto fs = p_.seq_factors(x);
          for (std::size_t k = 0; k + 1 < fs.size(); ++k) out.push_back(run |= fs[k]);
          return out;
        }
        if (c->vars[2] == var && a.sets.count(c->vars[1])) return {x & ~a.sets.at(c->vars[1])};
      }
      if ((c->kind == K::Factor || c->kind == K::SeqFactor) && c->vars[0] == var && c->vars[1] != var &&
          a.sets.count(c->vars[1])) {
        Mask r = a.sets.at(c->vars[1]);
        auto fs = c->kind == K::SeqFactor ? sequential_factors(p_, r) : all_factors(p_, r);
        std::vector<Mask> out;
        for (Mask m : fs)
          if ((m & ~u) == 0) out.push_back(m);
        return out;
      }
    }
    return all_submasks(u);
  }

  std::vector<Mask> all_submasks(Mask u) {
    std::vector<Mask> out;
    any_submask(u, [&](Mask s) {
      out.push_back(s);
      return false;
    });
    return out;
  }

  bool quantify_set(const Formula& f, Assignment& a, Mask u) {
    bool want = f.kind == K::ExistsSO;
    Scoped<Mask> bind(a.sets, f.vars[0]);
    for (Mask s : candidates(f, a, u)) {
      bind.set(s);
      if (eval(*f.kids[0], a, u) == want) return want;
    }
    return !want;
  }

  bool eval_q(const Formula& f, Assignment& a, Mask u) {
    Mask z = set(a, f.vars[0]);
    if (!z || !p_.is_factor(u, z)) return false;
    auto comps = p_.par_components(z);
    std::size_t k = f.kids.size();
    std::vector<std::vector<int>> options(comps.size());
    for (std::size_t j = 0; j < comps.size(); ++j) {
      for (std::size_t i = 0; i < k; ++i)
        if (eval(*f.kids[i], a, comps[j])) options[j].push_back(static_cast<int>(i));
      if (options[j].empty()) return false;
    }
    Vec y(k, 0);
    std::set<std::pair<std::size_t, Vec>> dead;
    std::function<bool(std::size_t)> go = [&](std::size_t j) {
      if (j == comps.size()) return member(f.set, y);
      if (dead.count({j, y})) return false;
      for (int i : options[j]) {
        ++y[i];
        if (go(j + 1)) return true;
        --y[i];
      }
      dead.insert({j, y});
      return false;
    };
    return go(0);
  }

  bool holds_on(const Formula& f, const std::string& var, Mask b, Assignment& a, Mask u) {
    Scoped<Mask> bind(a.sets, var);
    bind.set(b);
    return eval(f, a, u);
  }

  bool eval_iter(const Formula& f, Assignment& a, Mask u) {
    Mask x = set(a, f.vars[0]);
    if (!x || !p_.is_sequential(x)) return false;
    if (f.mode != Formula::Mode::Star && !f.eps1) return false;
    auto fs = p_.seq_factors(x);
    std::size_t t = fs.size();
    if (t < 2) return false;
    // reach[j][c]: the first j factors split into min(c, 2) accepted blocks
    std::vector<std::array<bool, 3>> reach(t + 1, {false, false, false});
    reach[0][0] = true;
    for (std::size_t j = 0; j < t; ++j) {
      if (!reach[j][0] && !reach[j][1] && !reach[j][2]) continue;
      Mask b = 0;
      for (std::size_t q = j + 1; q <= t; ++q) {
        b |= fs[q - 1];
        if (!holds_on(*f.kids[0], f.vars[1], b, a, u)) continue;
        for (int c = 0; c < 3; ++c)
          if (reach[j][c]) reach[q][std::min(c + 1, 2)] = true;
      }
    }
    return reach[t][2];
  }

  bool eval_dia(const Formula& f, Assignment& a, Mask u) {
    Mask x = set(a, f.vars[0]);
    if (!x || !p_.is_sequential(x)) return false;
    auto fs = p_.seq_factors(x);
    std::size_t t = fs.size();
    if (t < 2) return false;
    // state: position, next block kind (0 = G), G blocks so far, non-empty blocks so far (both capped at 2)
    std::set<std::tuple<std::size_t, int, int, int>> seen;
    std::vector<std::tuple<std::size_t, int, int, int>> todo{{0, 0, 0, 0}};
    seen.insert(todo[0]);
    while (!todo.empty()) {
      auto [pos, phase, gs, ne] = todo.back();
      todo.pop_back();
      if (phase == 1 && pos == t && gs == 2 && ne == 2) return true;
      const Formula& child = *f.kids[phase];
      bool eps_ok = phase == 0 ? f.eps1 : f.eps2;
      auto push = [&](std::size_t q, bool nonempty) {
        std::tuple<std::size_t, int, int, int> nx{q, 1 - phase, phase == 0 ? std::min(gs + 1, 2) : gs,
                                                  std::min(ne + (nonempty ? 1 : 0), 2)};
        if (seen.insert(nx).second) todo.push_back(nx);
      };
      if (eps_ok) push(pos, false);
      Mask b = 0;
      for (std::size_t q = pos + 1; q <= t; ++q) {
        b |= fs[q - 1];
        if (holds_on(child, f.vars[1], b, a, u)) push(q, true);
      }
    }
    return false;
  }

  // Conjuncts of the shape forall F (premise -> conclusion) whose premise
  // mentions the colouring of F. They are checked as soon as F is coloured.
  std::vector<const Formula*> guards(const Formula& f) {
    std::vector<const Formula*> cons, out;
    forced(f.kids[0], cons);
    const std::string& s = f.vars[0];
    for (const Formula* c : cons) {
      if (c->kind != K::ForallSO || c->kids[0]->kind != K::Implies) continue;
      std::function<bool(const Formula&)> mentions = [&](const Formula& g) {
        if (g.kind == K::Color && g.vars[0] == c->vars[0] && g.vars[1] == s) return true;
        for (const auto& k : g.kids)
          if (mentions(*k)) return true;
        return false;
      };
      if (mentions(*c->kids[0]->kids[0])) out.push_back(c);
    }
    return out;
  }

  bool exists_coloring(const Formula& f, Assignment& a, Mask u) {
    const std::string& s = f.vars[0];
    ColoringValue cv;
    cv.edges = f.edges;
    cv.coloring.colors = 2 * static_cast<int>(f.edges.size());
    auto factors = sequential_factors(p_, u);
    std::stable_sort(factors.begin(), factors.end(),
                     [](Mask x, Mask y) { return popcount(x) < popcount(y); });
    auto gs = guards(f);
    Scoped<ColoringValue> bind(a.colorings, s);
    bind.set(cv);

    // A guard that fails while only looking inside F stays false whatever is
    // decided for larger factors.
    auto refuted = [&](Mask m) {
      for (const Formula* g : gs) {
        Scoped<Mask> fb(a.sets, g->vars[0]);
        fb.set(m);
        Mask saved_probe = probe_;
        bool saved_escaped = escaped_;
        probe_ = m;
        escaped_ = false;
        bool ok = eval(*g->kids[0], a, u);
        bool local = !escaped_;
        probe_ = saved_probe;
        escaped_ = saved_escaped;
        if (!ok && local) return true;
      }
      return false;
    };

    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
      if (i == factors.size()) return eval(*f.kids[0], a, u);
      if (go(i + 1)) return true;
      Mask m = factors[i];
      auto& col = a.colorings.at(s).coloring.color;
      for (int c = 0; c < cv.coloring.colors; ++c) {
        bool fine = true;
        for (const auto& [g, gc] : col)
          if (pair_conflict(p_, m, c, g, gc)) {
            fine = false;
            break;
          }
        if (!fine) continue;
        col[m] = c;
        if (!refuted(m) && go(i + 1)) return true;
        a.colorings.at(s).coloring.color.erase(m);
      }
      return false;
    };
    return go(0);
  }
};

}  // namespace

bool model_check(const FormulaP& f, const SPTerm& t, const Assignment& asg) {
  Poset p = to_poset(t);
  if (p.n > max_model_size())
    throw ResourceBound("model has " + std::to_string(p.n) + " elements, cap is " + std::to_string(max_model_size()));
  Assignment a = asg;
  return Checker(p).eval(*f, a, p.all());
}

// ---------------------------------------------------------------------------
// Emission

namespace {

class Emitter {
 public:
  explicit Emitter(const DGraph& d) : d_(d) {}

  FormulaP phi(int n, const std::string& x) {
    const DNode& node = d_.at(n);
    switch (node.label.kind) {
      case NodeLabel::Kind::Letter:
        return fm::and_({fm::size(x, 1), fm::forall("x", fm::implies(fm::in("x", x), fm::letter(node.label.letter, "x")))});
      case NodeLabel::Kind::Pres: {
        std::vector<FormulaP> chis;
        for (const auto& e : node.out) {
          std::string y = fresh("Y");
          FormulaP inner = e.special ? colored(y, {n, e.to}) : phi(e.to, y);
          chis.push_back(fm::forall(y, fm::implies(whole(y), inner)));
        }
        return fm::q(x, chis, node.label.set);
      }
      case NodeLabel::Kind::Op:
        break;
    }
    const auto& out = node.out;
    switch (node.label.op) {
      case Op::Seq1: {
        std::string x1 = fresh("X"), x2 = fresh("X");
        return fm::exists(x1, fm::exists(x2, fm::and_({fm::seqsum(x, x1, x2), phi(out[0].to, x1), phi(out[1].to, x2)})));
      }
      case Op::Dia1: {
        std::string y = fresh("Y");
        return fm::dia(x, y, accepts_empty(out[0].to), accepts_empty(out[1].to), phi(out[0].to, y), phi(out[1].to, y));
      }
      default: {
        Formula::Mode m = node.label.op == Op::Omega1    ? Formula::Mode::Omega
                          : node.label.op == Op::MOmega1 ? Formula::Mode::MOmega
                                                         : Formula::Mode::Star;
        std::string y = fresh("Y");
        return fm::iter(x, y, m, accepts_empty(out[0].to), phi(out[0].to, y));
      }
    }
  }

  FormulaP sentence(bool nullable) {
    auto edges = special_edges(d_);
    std::vector<FormulaP> parts{whole("R"), fm::scoloring("R", "S"), phi(d_.root, "R")};
    for (const auto& e : edges) {
      FormulaP premise = fm::and_({fm::factor("F", "R", true), colored("F", e)});
      parts.push_back(fm::forall("F", fm::implies(premise, phi(e.to, "F"))));
    }
    FormulaP main = fm::exists("R", fm::exists_coloring("S", edges, fm::and_(parts)));
    if (!nullable) return main;
    return fm::or_({main, fm::forall("X", fm::implies(whole("X"), fm::size("X", 0)))});
  }

 private:
  const DGraph& d_;
  int counter_ = 0;

  std::string fresh(const std::string& base) { return base + std::to_string(++counter_); }

  static FormulaP whole(const std::string& y) { return fm::forall("y", fm::in("y", y)); }
  static FormulaP colored(const std::string& y, SpecialEdge e) {
    return fm::or_({fm::color(y, "S", 0, e), fm::color(y, "S", 1, e)});
  }

  bool accepts_empty(int n) const {
    const NodeLabel& l = d_.at(n).label;
    return l.is_pres() && contains_zero(l.set);
  }
};

}  // namespace

FormulaP emit_phi_node(const DGraph& d, int n, const std::string& var) { return Emitter(d).phi(n, var); }

FormulaP emit_phi(const DGraph& d, bool nullable) { return Emitter(d).sentence(nullable); }

}  // namespace spkit
