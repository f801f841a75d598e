#include "spkit/rexpr.hpp"

#include <cctype>
#include <map>

#include "spkit/dgraph.hpp"

namespace spkit {

namespace {

using K = Expr::Kind;

struct OpInfo {
  K kind;
  int arity;  // -1: one or more
  bool binder;
};

const std::map<std::string, OpInfo, std::less<>>& operators() {
  static const std::map<std::string, OpInfo, std::less<>> m = {
      {"or", {K::Or, -1, false}},         {"par", {K::Par, -1, false}},
      {"seq", {K::Seq, -1, false}},       {"star", {K::Star, 1, false}},
      {"omega", {K::Omega, 1, false}},    {"momega", {K::MOmega, 1, false}},
      {"ord", {K::Ord, 1, false}},        {"mord", {K::MOrd, 1, false}},
      {"dia", {K::Dia, 2, false}},        {"diamond", {K::Diamond, 1, false}},
      {"sub", {K::Sub, 2, true}},         {"istar", {K::IStar, 1, true}},
      {"seq1", {K::Seq1, 2, false}},      {"star1", {K::Star1, 1, false}},
      {"dia1", {K::Dia1, 2, false}},      {"omega1", {K::Omega1, 1, false}},
      {"momega1", {K::MOmega1, 1, false}}, {"ord1", {K::Ord1, 1, false}},
      {"mord1", {K::MOrd1, 1, false}},
  };
  return m;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ExprP parse() {
    ExprP e = expr();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, i_); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  std::string ident() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (b == i_) fail("expected an expression");
    if (!std::isalpha(static_cast<unsigned char>(s_[b]))) {
      i_ = b;
      fail("expected a letter or operator name");
    }
    return std::string(s_.substr(b, i_ - b));
  }

  std::string bound_letter() {
    std::size_t at = (skip(), i_);
    std::string x = ident();
    if (x == "eps" || x == "empty" || operators().count(x)) {
      i_ = at;
      fail("expected a letter to bind");
    }
    return x;
  }

  ExprP expr() {
    std::size_t at = (skip(), i_);
    std::string name = ident();
    if (name == "eps") return ex::eps();
    if (name == "empty") return ex::empty();
    auto it = operators().find(name);
    if (it == operators().end()) {
      if (peek('(')) {
        i_ = at;
        fail("unknown operator '" + name + "'");
      }
      return ex::letter(name);
    }
    const OpInfo& op = it->second;
    expect('(');
    std::string x;
    if (op.binder) {
      x = bound_letter();
      expect(',');
    }
    std::vector<ExprP> kids{expr()};
    while (peek(',')) {
      ++i_;
      kids.push_back(expr());
    }
    if (op.arity >= 0 && static_cast<int>(kids.size()) != op.arity)
      fail(name + " takes " + std::to_string(op.arity) + " operand(s)");
    expect(')');
    return ex::make(op.kind, std::move(kids), x);
  }
};

void collect_letters(const ExprP& e, std::set<std::string>& out, bool binders_only) {
  if (e->kind == K::Letter && !binders_only) out.insert(e->letter);
  if (e->kind == K::Sub || e->kind == K::IStar) out.insert(e->letter);
  for (const auto& k : e->kids) collect_letters(k, out, binders_only);
}

void validate_into(const ExprP& e, std::vector<std::string>& out) {
  for (const auto& k : e->kids) validate_into(k, out);
  if (e->kind == K::Sub && nullable(e->kids[0])) out.push_back(kEpsInSub);
  if (e->kind == K::IStar) {
    const ExprP& body = e->kids[0];
    if (nullable(body)) out.push_back(kEpsInIStar);
    // The comparability condition is read off the graph of the operand.
    bool series = true;
    try {
      series = xi_series_check(build_rational(body, false), e->letter);
    } catch (const Error&) {
      series = true;
    }
    if (series) out.push_back(kXiComparable);
  }
}

void push_branch(std::vector<ExprP>& out, const ExprP& b) {
  if (b->kind == K::Or) {
    for (const auto& k : b->kids) push_branch(out, k);
    return;
  }
  std::string t = to_text(b);
  for (const auto& o : out)
    if (to_text(o) == t) return;
  out.push_back(b);
}

// Flattened union with identical branches dropped.
ExprP union_of(const std::vector<ExprP>& parts) {
  std::vector<ExprP> out;
  for (const auto& p : parts) push_branch(out, p);
  if (out.size() == 1) return out[0];
  return ex::make(K::Or, std::move(out));
}

ExprP star_rewrite(const ExprP& l) { return union_of({ex::make(K::Star1, {l}), l, ex::eps()}); }

ExprP gt1(const ExprP& e) {
  std::vector<ExprP> k;
  for (const auto& c : e->kids) k.push_back(gt1(c));
  switch (e->kind) {
    case K::Empty:
    case K::Eps:
    case K::Letter:
      return e;
    case K::Or:
      return union_of(k);
    case K::Par:
      return ex::make(K::Par, k);
    case K::Seq: {
      // Right-nested binary products.
      ExprP acc = k.back();
      bool acc_null = nullable(e->kids.back());
      for (int i = static_cast<int>(k.size()) - 2; i >= 0; --i) {
        bool left_null = nullable(e->kids[i]);
        std::vector<ExprP> parts{ex::make(K::Seq1, {k[i], acc})};
        if (left_null) parts.push_back(acc);
        if (acc_null) parts.push_back(k[i]);
        acc = union_of(parts);
        acc_null = acc_null && left_null;
      }
      return acc;
    }
    case K::Star:
      return star_rewrite(k[0]);
    case K::Ord:
      return union_of({ex::make(K::Ord1, {k[0]}), k[0], ex::eps()});
    case K::MOrd:
      return union_of({ex::make(K::MOrd1, {k[0]}), k[0], ex::eps()});
    case K::Omega:
    case K::MOmega: {
      ExprP head = ex::make(e->kind == K::Omega ? K::Omega1 : K::MOmega1, {k[0]});
      if (!nullable(e->kids[0])) return head;
      return union_of({head, star_rewrite(k[0])});
    }
    case K::Dia: {
      std::vector<ExprP> parts{ex::make(K::Dia1, {k[0], k[1]}), k[0]};
      if (nullable(e->kids[0])) parts.push_back(k[1]);
      return union_of(parts);
    }
    case K::Diamond:
      return gt1(ex::or_({ex::make(K::Dia, {e->kids[0], ex::eps()}), ex::eps()}));
    case K::Sub:
      return ex::sub(e->letter, k[0], k[1]);
    case K::IStar:
      return ex::istar(e->letter, k[0]);
    default:
      return ex::make(e->kind, k, e->letter);
  }
}

}  // namespace

namespace ex {
ExprP empty() { return make(K::Empty, {}); }
ExprP eps() { return make(K::Eps, {}); }
ExprP letter(std::string a) { return make(K::Letter, {}, std::move(a)); }
ExprP make(Expr::Kind k, std::vector<ExprP> kids, std::string letter) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = std::move(kids);
  e->letter = std::move(letter);
  return e;
}
ExprP or_(std::vector<ExprP> kids) { return make(K::Or, std::move(kids)); }
ExprP par(std::vector<ExprP> kids) { return make(K::Par, std::move(kids)); }
ExprP seq(std::vector<ExprP> kids) { return make(K::Seq, std::move(kids)); }
ExprP sub(std::string x, ExprP inner, ExprP outer) {
  return make(K::Sub, {std::move(inner), std::move(outer)}, std::move(x));
}
ExprP istar(std::string x, ExprP body) { return make(K::IStar, {std::move(body)}, std::move(x)); }
}  // namespace ex

const char* kind_name(Expr::Kind k) {
  switch (k) {
    case K::Empty: return "empty";
    case K::Eps: return "eps";
    case K::Letter: return "letter";
    case K::Or: return "or";
    case K::Par: return "par";
    case K::Seq: return "seq";
    case K::Star: return "star";
    case K::Omega: return "omega";
    case K::MOmega: return "momega";
    case K::Ord: return "ord";
    case K::MOrd: return "mord";
    case K::Dia: return "dia";
    case K::Diamond: return "diamond";
    case K::Sub: return "sub";
    case K::IStar: return "istar";
    case K::Seq1: return "seq1";
    case K::Star1: return "star1";
    case K::Dia1: return "dia1";
    case K::Omega1: return "omega1";
    case K::MOmega1: return "momega1";
    case K::Ord1: return "ord1";
    case K::MOrd1: return "mord1";
  }
  return "?";
}

ExprP parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string to_text(const ExprP& e) {
  switch (e->kind) {
    case K::Empty:
    case K::Eps:
      return kind_name(e->kind);
    case K::Letter:
      return e->letter;
    default:
      break;
  }
  std::string s = std::string(kind_name(e->kind)) + "(";
  if (e->kind == K::Sub || e->kind == K::IStar) s += e->letter + ",";
  for (std::size_t i = 0; i < e->kids.size(); ++i) s += (i ? "," : "") + to_text(e->kids[i]);
  return s + ")";
}

bool is_gt1_kind(Expr::Kind k) {
  return k == K::Seq1 || k == K::Star1 || k == K::Dia1 || k == K::Omega1 || k == K::MOmega1 ||
         k == K::Ord1 || k == K::MOrd1;
}

bool is_plain_sequential(Expr::Kind k) {
  return k == K::Seq || k == K::Star || k == K::Omega || k == K::MOmega || k == K::Ord ||
         k == K::MOrd || k == K::Dia || k == K::Diamond;
}

bool is_gt1(const ExprP& e) {
  if (is_plain_sequential(e->kind)) return false;
  for (const auto& k : e->kids)
    if (!is_gt1(k)) return false;
  return true;
}

bool nullable(const ExprP& e) {
  const auto& k = e->kids;
  switch (e->kind) {
    case K::Eps:
    case K::Star:
    case K::Ord:
    case K::MOrd:
    case K::Diamond:
      return true;
    case K::Or:
      for (const auto& c : k)
        if (nullable(c)) return true;
      return false;
    case K::Par:
    case K::Seq:
      for (const auto& c : k)
        if (!nullable(c)) return false;
      return true;
    case K::Omega:
    case K::MOmega:
    case K::Dia:
      return nullable(k[0]);
    case K::Sub:
      return nullable(k[1]);
    case K::IStar:
      return nullable(k[0]);
    default:
      return false;
  }
}

std::set<std::string> letters(const ExprP& e) {
  std::set<std::string> out;
  collect_letters(e, out, false);
  return out;
}

std::set<std::string> binders(const ExprP& e) {
  std::set<std::string> out;
  collect_letters(e, out, true);
  return out;
}

std::vector<std::string> validate(const ExprP& e) {
  std::vector<std::string> out;
  validate_into(e, out);
  return out;
}

ExprP to_gt1(const ExprP& e, bool check) {
  if (check) {
    auto v = validate(e);
    if (!v.empty()) throw ValidationFailed(v);
  }
  return gt1(e);
}

}  // namespace spkit
