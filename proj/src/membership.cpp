#include "spkit/membership.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace spkit {

namespace {

using K = Expr::Kind;
using Lang = std::set<SPTerm>;

class LangBuilder {
 public:
  LangBuilder(int bound, std::size_t ceiling) : n_(bound), ceiling_(ceiling) {}

  const Lang& of(const ExprP& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Lang l = compute(e);
    if (l.size() > ceiling_) throw ResourceBound("language has more than " + std::to_string(ceiling_) + " members");
    return memo_.emplace(e.get(), std::move(l)).first->second;
  }

 private:
  int n_;
  std::size_t ceiling_;
  std::map<const Expr*, Lang> memo_;

  void guard(const Lang& l) const {
    if (l.size() > ceiling_) throw ResourceBound("language has more than " + std::to_string(ceiling_) + " members");
  }

  Lang product(const Lang& a, const Lang& b, bool seq) const {
    Lang out;
    for (const auto& x : a)
      for (const auto& y : b) {
        if (x.size() + y.size() > n_) break;  // b is ordered by size
        out.insert(seq ? SPTerm::seq({x, y}) : SPTerm::par({x, y}));
      }
    guard(out);
    return out;
  }

  static Lang nonempty(const Lang& l) {
    Lang out = l;
    out.erase(SPTerm::eps());
    return out;
  }

  // Products of at least `min_blocks` members of l, all non-empty.
  Lang blocks(const Lang& l, int min_blocks) const {
    Lang base = nonempty(l);
    Lang exact{SPTerm::eps()};  // products of exactly k blocks
    Lang out;
    for (int k = 1; !exact.empty(); ++k) {
      exact = product(exact, base, true);
      if (k >= min_blocks) out.insert(exact.begin(), exact.end());
    }
    if (min_blocks == 0) out.insert(SPTerm::eps());
    guard(out);
    return out;
  }

  // All ways of replacing each xi leaf of q by a member of by.
  Lang replace(const SPTerm& q, const std::string& xi, const Lang& by) const {
    switch (q.kind) {
      case SPTerm::Kind::Empty:
        return {q};
      case SPTerm::Kind::Letter:
        if (q.letter != xi) return {q};
        {
          Lang out;
          for (const auto& r : by)
            if (r.size() <= n_) out.insert(r);
          return out;
        }
      default: {
        Lang acc{SPTerm::eps()};
        for (const auto& k : q.kids) {
          acc = product(acc, replace(k, xi, by), q.kind == SPTerm::Kind::Seq);
          if (acc.empty()) break;
        }
        return acc;
      }
    }
  }

  Lang substitute(const Lang& outer, const std::string& xi, const Lang& by) const {
    Lang out;
    for (const auto& q : outer) {
      Lang r = replace(q, xi, by);
      out.insert(r.begin(), r.end());
    }
    guard(out);
    return out;
  }

  Lang alternate(const Lang& g, const Lang& h, bool strict) const {
    // States: poset, number of G blocks (capped at 2), non-empty factors (capped at 2).
    struct St {
      SPTerm t;
      int gs, ne;
      bool operator<(const St& o) const {
        if (gs != o.gs) return gs < o.gs;
        if (ne != o.ne) return ne < o.ne;
        return t < o.t;
      }
    };
    std::set<St> seen;
    std::vector<St> todo;
    for (const auto& x : g) {
      St s{x, 1, x.empty() ? 0 : 1};
      if (seen.insert(s).second) todo.push_back(s);
    }
    while (!todo.empty()) {
      St s = todo.back();
      todo.pop_back();
      for (const auto& y : h) {
        if (s.t.size() + y.size() > n_) break;
        for (const auto& x : g) {
          if (s.t.size() + y.size() + x.size() > n_) break;
          St nx{SPTerm::seq({s.t, y, x}), std::min(s.gs + 1, 2),
                std::min(s.ne + (y.empty() ? 0 : 1) + (x.empty() ? 0 : 1), 2)};
          if (seen.insert(nx).second) todo.push_back(nx);
        }
      }
      if (seen.size() > ceiling_) throw ResourceBound("alternating products exceed the ceiling");
    }
    Lang out;
    for (const auto& s : seen)
      if (!strict || (s.gs == 2 && s.ne == 2)) out.insert(s.t);
    return out;
  }

  Lang compute(const ExprP& e) {
    const auto& k = e->kids;
    switch (e->kind) {
      case K::Empty:
        return {};
      case K::Eps:
        return {SPTerm::eps()};
      case K::Letter:
        if (n_ < 1) return {};
        return {SPTerm::atom(e->letter)};
      case K::Or: {
        Lang out;
        for (const auto& c : k) {
          const Lang& l = of(c);
          out.insert(l.begin(), l.end());
        }
        return out;
      }
      case K::Par:
      case K::Seq: {
        Lang acc{SPTerm::eps()};
        for (const auto& c : k) acc = product(acc, of(c), e->kind == K::Seq);
        return acc;
      }
      case K::Seq1:
        return product(nonempty(of(k[0])), nonempty(of(k[1])), true);
      case K::Star:
      case K::Ord:
      case K::MOrd:
        return blocks(of(k[0]), 0);
      case K::Star1:
      case K::Ord1:
      case K::MOrd1:
        return blocks(of(k[0]), 2);
      case K::Omega:
      case K::MOmega:
        return of(k[0]).count(SPTerm::eps()) ? blocks(of(k[0]), 0) : Lang{};
      case K::Omega1:
      case K::MOmega1:
        return of(k[0]).count(SPTerm::eps()) ? blocks(of(k[0]), 2) : Lang{};
      case K::Dia:
        return alternate(of(k[0]), of(k[1]), false);
      case K::Dia1:
        return alternate(of(k[0]), of(k[1]), true);
      case K::Diamond: {
        Lang out = alternate(of(k[0]), {SPTerm::eps()}, false);
        out.insert(SPTerm::eps());
        return out;
      }
      case K::Sub:
        return substitute(of(k[1]), e->letter, of(k[0]));
      case K::IStar: {
        const Lang& body = of(k[0]);
        Lang acc{SPTerm::atom(e->letter)};
        while (true) {
          Lang next = substitute(body, e->letter, acc);
          std::size_t before = acc.size();
          acc.insert(next.begin(), next.end());
          guard(acc);
          if (acc.size() == before) return acc;
        }
      }
    }
    return {};
  }
};

// Path search on one poset. Every recursive call either shrinks the element
// set or moves from a set node to a non-set child, and set nodes are never
// adjacent, so the recursion is well founded on built graphs. In-progress
// entries answer false to stay safe on hand-made graphs.
class Matcher {
 public:
  Matcher(const DGraph& d, const SPTerm& t) : d_(d), p_(to_poset(t)) {}

  const Poset& poset() const { return p_; }

  bool ok(int node, Mask m) {
    auto key = std::make_pair(node, m);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second == 2;
    memo_[key] = 1;
    bool r = decide(node, m);
    memo_[key] = r ? 2 : 0;
    return r;
  }

  PathTree tree(int node, Mask m) {
    const DNode& n = d_.at(node);
    PathTree t;
    t.node = node;
    t.elems = m;
    switch (n.label.kind) {
      case NodeLabel::Kind::Letter:
        t.deco = PathTree::Deco::Letter;
        t.letter = n.label.letter;
        return t;
      case NodeLabel::Kind::Pres: {
        t.deco = PathTree::Deco::Vector;
        auto a = assignment(node, m);
        t.vector = a->first;
        auto comps = p_.par_components(m);
        std::vector<std::pair<int, Mask>> order;
        for (std::size_t j = 0; j < comps.size(); ++j) order.push_back({a->second[j], comps[j]});
        std::sort(order.begin(), order.end());
        for (auto [pos, c] : order) add_kid(t, n, pos, c);
        return t;
      }
      case NodeLabel::Kind::Op:
        break;
    }
    t.deco = PathTree::Deco::Arity;
    auto f = p_.seq_factors(m);
    auto span = [&](std::size_t a, std::size_t b) {
      Mask r = 0;
      for (std::size_t i = a; i < b; ++i) r |= f[i];
      return r;
    };
    std::vector<std::pair<int, Mask>> parts;
    switch (n.label.op) {
      case Op::Seq1:
        for (std::size_t c = 1; c < f.size(); ++c)
          if (ok(n.out[0].to, span(0, c)) && ok(n.out[1].to, span(c, f.size()))) {
            parts = {{1, span(0, c)}, {2, span(c, f.size())}};
            break;
          }
        break;
      case Op::Dia1:
        parts = alternation(n, f);
        break;
      default: {
        for (Mask b : block_split(n.out[0].to, f)) parts.push_back({1, b});
        if (n.label.op == Op::Omega1) parts.push_back({1, 0});
        if (n.label.op == Op::MOmega1) parts.insert(parts.begin(), {1, 0});
      }
    }
    for (auto [pos, c] : parts) add_kid(t, n, pos, c);
    t.arity = static_cast<int>(t.kids.size());
    return t;
  }

 private:
  const DGraph& d_;
  Poset p_;
  std::map<std::pair<int, Mask>, int> memo_;

  void add_kid(PathTree& t, const DNode& n, int pos, Mask c) {
    const OutEdge& e = n.out[pos - 1];
    t.kids.push_back(tree(e.to, c));
    t.via.push_back(pos);
    t.special.push_back(e.special);
  }

  // Count vector and the 1-based position chosen for each parallel component.
  std::optional<std::pair<Vec, std::vector<int>>> assignment(int node, Mask m) {
    const DNode& n = d_.at(node);
    const SemiLinear& s = n.label.set;
    int k = static_cast<int>(n.out.size());
    if (m == 0) {
      Vec z(k, 0);
      if (member(s, z)) return std::make_pair(z, std::vector<int>{});
      return std::nullopt;
    }
    auto comps = p_.par_components(m);
    std::vector<std::vector<int>> options(comps.size());
    for (std::size_t j = 0; j < comps.size(); ++j) {
      for (int i = 0; i < k; ++i)
        if (ok(n.out[i].to, comps[j])) options[j].push_back(i + 1);
      if (options[j].empty()) return std::nullopt;
    }
    Vec y(k, 0);
    std::vector<int> chosen(comps.size());
    std::set<std::pair<std::size_t, Vec>> dead;
    std::function<bool(std::size_t)> go = [&](std::size_t j) {
      if (j == comps.size()) return member(s, y);
      if (dead.count({j, y})) return false;
      for (int pos : options[j]) {
        ++y[pos - 1];
        chosen[j] = pos;
        if (go(j + 1)) return true;
        --y[pos - 1];
      }
      dead.insert({j, y});
      return false;
    };
    if (!go(0)) return std::nullopt;
    return std::make_pair(y, chosen);
  }

  // Split of the factor list into at least two non-empty blocks accepted by child.
  std::vector<Mask> block_split(int child, const std::vector<Mask>& f) {
    std::size_t t = f.size();
    if (t < 2) return {};
    // reach[j][c]: factors [0, j) covered with min(c, 2) blocks; back pointer to the block start.
    std::vector<std::array<int, 3>> from(t + 1, {-1, -1, -1});
    from[0][0] = 0;
    for (std::size_t j = 0; j < t; ++j)
      for (int c = 0; c < 3; ++c) {
        if (from[j][c] < 0) continue;
        Mask b = 0;
        for (std::size_t q = j + 1; q <= t; ++q) {
          b |= f[q - 1];
          int nc = std::min(c + 1, 2);
          if (from[q][nc] < 0 && ok(child, b)) from[q][nc] = static_cast<int>(j) * 3 + c;
        }
      }
    if (from[t][2] < 0) return {};
    std::vector<Mask> out;
    std::size_t j = t;
    int c = 2;
    while (j > 0) {
      int prev = from[j][c];
      std::size_t pj = static_cast<std::size_t>(prev / 3);
      Mask b = 0;
      for (std::size_t i = pj; i < j; ++i) b |= f[i];
      out.push_back(b);
      j = pj;
      c = prev % 3;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // G1 H1 ... Gk with k >= 2 and at least two non-empty factors; G from child
  // 1, H from child 2. Returns (position, block) pairs, empty when impossible.
  std::vector<std::pair<int, Mask>> alternation(const DNode& n, const std::vector<Mask>& f) {
    int g = n.out[0].to, h = n.out[1].to;
    std::size_t t = f.size();
    struct St {
      std::size_t pos;
      int phase, gs, ne;  // phase 0: a G block comes next
      auto key() const { return std::make_tuple(pos, phase, gs, ne); }
    };
    std::map<std::tuple<std::size_t, int, int, int>, std::pair<std::tuple<std::size_t, int, int, int>, Mask>> parent;
    std::vector<St> todo{{0, 0, 0, 0}};
    parent[todo[0].key()] = {todo[0].key(), 0};
    bool g_eps = ok(g, 0), h_eps = ok(h, 0);
    while (!todo.empty()) {
      St s = todo.back();
      todo.pop_back();
      if (s.phase == 1 && s.pos == t && s.gs == 2 && s.ne == 2) {
        std::vector<std::pair<int, Mask>> out;
        auto k = s.key();
        while (k != std::make_tuple(std::size_t{0}, 0, 0, 0)) {
          auto [pk, b] = parent.at(k);
          out.push_back({std::get<1>(k) == 1 ? 1 : 2, b});
          k = pk;
        }
        std::reverse(out.begin(), out.end());
        return out;
      }
      int child = s.phase == 0 ? g : h;
      bool eps_ok = s.phase == 0 ? g_eps : h_eps;
      auto push = [&](std::size_t pos, bool nonempty, Mask b) {
        St nx{pos, 1 - s.phase, s.phase == 0 ? std::min(s.gs + 1, 2) : s.gs,
              std::min(s.ne + (nonempty ? 1 : 0), 2)};
        if (parent.emplace(nx.key(), std::make_pair(s.key(), b)).second) todo.push_back(nx);
      };
      if (eps_ok) push(s.pos, false, 0);
      Mask b = 0;
      for (std::size_t q = s.pos + 1; q <= t; ++q) {
        b |= f[q - 1];
        if (ok(child, b)) push(q, true, b);
      }
    }
    return {};
  }

  bool decide(int node, Mask m) {
    const DNode& n = d_.at(node);
    switch (n.label.kind) {
      case NodeLabel::Kind::Letter:
        return popcount(m) == 1 && p_.label[lowest(m)] == n.label.letter;
      case NodeLabel::Kind::Pres:
        return assignment(node, m).has_value();
      case NodeLabel::Kind::Op:
        break;
    }
    if (m == 0 || !p_.is_sequential(m)) return false;
    auto f = p_.seq_factors(m);
    if (f.size() < 2) return false;
    switch (n.label.op) {
      case Op::Seq1: {
        Mask left = 0;
        for (std::size_t c = 1; c < f.size(); ++c) {
          left |= f[c - 1];
          if (ok(n.out[0].to, left) && ok(n.out[1].to, m & ~left)) return true;
        }
        return false;
      }
      case Op::Dia1:
        return !alternation(n, f).empty();
      case Op::Omega1:
      case Op::MOmega1:
        if (!ok(n.out[0].to, 0)) return false;
        return !block_split(n.out[0].to, f).empty();
      default:
        return !block_split(n.out[0].to, f).empty();
    }
  }
};

struct PathChecker {
  const DGraph& d;
  const Poset& p;

  std::optional<std::string> fail(const PathTree& t, const std::string& why) const {
    return "n" + std::to_string(t.node) + ": " + why;
  }

  bool ordered(Mask a, Mask b) const {
    bool all = true;
    for_each_bit(a, [&](int i) {
      if ((p.above[i] & b) != b) all = false;
    });
    return all;
  }

  bool unrelated(Mask a, Mask b) const {
    bool none = true;
    for_each_bit(a, [&](int i) {
      if ((p.above[i] | p.below[i]) & b) none = false;
    });
    return none;
  }

  std::optional<std::string> check(const PathTree& t) const {
    if (!d.nodes.count(t.node)) return fail(t, "unknown node");
    if ((t.elems & ~p.all()) != 0) return fail(t, "elements outside the poset");
    const DNode& n = d.at(t.node);
    if (t.via.size() != t.kids.size() || t.special.size() != t.kids.size()) return fail(t, "malformed kid list");
    Mask seen = 0;
    for (std::size_t k = 0; k < t.kids.size(); ++k) {
      int v = t.via[k];
      if (v < 1 || v > static_cast<int>(n.out.size())) return fail(t, "position out of range");
      const OutEdge& e = n.out[v - 1];
      if (t.kids[k].node != e.to) return fail(t, "kid is not the target of its edge");
      if (t.special[k] != e.special) return fail(t, "edge kind mismatch");
      if (t.kids[k].elems & seen) return fail(t, "kids overlap");
      seen |= t.kids[k].elems;
    }
    if (!t.kids.empty() || n.label.kind != NodeLabel::Kind::Letter)
      if (seen != t.elems) return fail(t, "kids do not cover the elements");

    int nonempty = 0;
    for (const auto& k : t.kids)
      if (k.elems) ++nonempty;

    switch (n.label.kind) {
      case NodeLabel::Kind::Letter:
        if (t.deco != PathTree::Deco::Letter || t.letter != n.label.letter) return fail(t, "wrong letter decoration");
        if (!t.kids.empty()) return fail(t, "leaf with kids");
        if (popcount(t.elems) != 1 || p.label[lowest(t.elems)] != t.letter) return fail(t, "leaf label mismatch");
        return std::nullopt;
      case NodeLabel::Kind::Pres: {
        const SemiLinear& s = n.label.set;
        if (t.deco != PathTree::Deco::Vector) return fail(t, "set node needs a vector");
        if (static_cast<int>(t.vector.size()) != s.dim || !member(s, t.vector)) return fail(t, "vector not in the set");
        Vec count(s.dim, 0);
        for (int v : t.via) ++count[v - 1];
        if (count != t.vector) return fail(t, "kid counts differ from the vector");
        for (std::size_t a = 0; a < t.kids.size(); ++a) {
          if (!t.kids[a].elems) return fail(t, "empty parallel component");
          for (std::size_t b = a + 1; b < t.kids.size(); ++b)
            if (!unrelated(t.kids[a].elems, t.kids[b].elems)) return fail(t, "components are related");
        }
        break;
      }
      case NodeLabel::Kind::Op: {
        if (t.deco != PathTree::Deco::Arity || t.arity != static_cast<int>(t.kids.size()))
          return fail(t, "operator needs its arity");
        if (!p.is_sequential(t.elems) || nonempty < 2) return fail(t, "needs two non-empty factors");
        for (std::size_t a = 0; a < t.kids.size(); ++a)
          for (std::size_t b = a + 1; b < t.kids.size(); ++b)
            if (!ordered(t.kids[a].elems, t.kids[b].elems)) return fail(t, "factors are not in sequence");
        Op op = n.label.op;
        std::size_t m = t.kids.size();
        if (op == Op::Seq1) {
          if (m != 2 || t.via[0] != 1 || t.via[1] != 2 || nonempty != 2) return fail(t, "product needs two factors");
        } else if (op == Op::Dia1) {
          if (m % 2 == 0) return fail(t, "alternation must end with a first-operand block");
          int gs = 0;
          for (std::size_t k = 0; k < m; ++k) {
            if (t.via[k] != (k % 2 == 0 ? 1 : 2)) return fail(t, "blocks do not alternate");
            if (k % 2 == 0) ++gs;
          }
          if (gs < 2) return fail(t, "alternation needs two first-operand blocks");
        } else {
          if (op == Op::Omega1 && (m == 0 || t.kids.back().elems != 0)) return fail(t, "missing empty tail");
          if (op == Op::MOmega1 && (m == 0 || t.kids.front().elems != 0)) return fail(t, "missing empty head");
        }
        break;
      }
    }
    for (const auto& k : t.kids)
      if (auto r = check(k)) return r;
    return std::nullopt;
  }
};

void collect_marks(const PathTree& t, std::vector<MarkedFactor>& out) {
  for (std::size_t k = 0; k < t.kids.size(); ++k) {
    if (t.special[k]) out.push_back({t.kids[k].elems, t.node, t.kids[k].node});
    collect_marks(t.kids[k], out);
  }
}

}  // namespace

ExprLanguage::ExprLanguage(ExprP e, std::size_t ceiling) : e_(std::move(e)), ceiling_(ceiling) {}

const std::set<SPTerm>& ExprLanguage::upto(int bound) {
  if (bound > bound_) {
    LangBuilder b(bound, ceiling_);
    lang_ = b.of(e_);
    bound_ = bound;
  }
  return lang_;
}

bool ExprLanguage::contains(const SPTerm& p) { return upto(std::max(p.size(), bound_)).count(p) > 0; }

bool member_expr(const ExprP& e, const SPTerm& p) {
  auto v = validate(e);
  if (!v.empty()) throw ValidationFailed(v);
  return ExprLanguage(e).contains(p);
}

bool member_dgraph(const DGraph& d, const SPTerm& p) {
  Matcher m(d, p);
  return m.ok(d.root, m.poset().all());
}

std::optional<PathTree> find_path(const DGraph& d, const SPTerm& p) {
  Matcher m(d, p);
  if (!m.ok(d.root, m.poset().all())) return std::nullopt;
  return m.tree(d.root, m.poset().all());
}

std::optional<std::string> check_path(const DGraph& d, const SPTerm& p, const PathTree& t) {
  Poset q = to_poset(p);
  if (t.node != d.root) return std::string("path does not start at the root");
  if (t.elems != q.all()) return std::string("path does not cover the poset");
  return PathChecker{d, q}.check(t);
}

std::vector<MarkedFactor> marked_factors(const PathTree& t) {
  std::vector<MarkedFactor> out;
  collect_marks(t, out);
  return out;
}

nlohmann::json to_json(const PathTree& t, const Poset& p) {
  nlohmann::json j;
  j["node"] = "n" + std::to_string(t.node);
  nlohmann::json elems = nlohmann::json::array();
  for_each_bit(t.elems, [&](int i) { elems.push_back(std::to_string(i)); });
  j["elements"] = elems;
  j["poset"] = p.term(t.elems).text();
  switch (t.deco) {
    case PathTree::Deco::Letter: j["letter"] = t.letter; break;
    case PathTree::Deco::Arity: j["arity"] = t.arity; break;
    case PathTree::Deco::Vector: j["vector"] = t.vector; break;
  }
  nlohmann::json kids = nlohmann::json::array();
  for (std::size_t k = 0; k < t.kids.size(); ++k) {
    nlohmann::json c = to_json(t.kids[k], p);
    c["via"] = t.via[k];
    c["special"] = static_cast<bool>(t.special[k]);
    kids.push_back(c);
  }
  j["kids"] = kids;
  return j;
}

std::set<SPTerm> enumerate_language(const ExprP& e, int n) {
  auto v = validate(e);
  if (!v.empty()) throw ValidationFailed(v);
  return ExprLanguage(e).upto(n);
}

std::vector<std::string> graph_letters(const DGraph& d) {
  std::set<std::string> s;
  for (const auto& [id, node] : d.nodes)
    if (node.label.kind == NodeLabel::Kind::Letter) s.insert(node.label.letter);
  return {s.begin(), s.end()};
}

std::set<SPTerm> enumerate_language(const DGraph& d, int n) {
  std::set<SPTerm> out;
  for (const auto& t : enumerate_posets(graph_letters(d), n))
    if (member_dgraph(d, t)) out.insert(t);
  return out;
}

}  // namespace spkit
