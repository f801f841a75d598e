#include "spkit/dgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace spkit {

namespace {

using K = Expr::Kind;

int max_id(const DGraph& d) { return d.nodes.empty() ? 0 : d.nodes.rbegin()->first; }

std::set<int> reachable(const DGraph& d, bool normal_only) {
  std::set<int> seen{d.root};
  std::vector<int> stack{d.root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (const auto& e : d.at(n).out) {
      if (normal_only && e.special) continue;
      if (seen.insert(e.to).second) stack.push_back(e.to);
    }
  }
  return seen;
}

bool is_pres(const DGraph& d, int id) { return d.at(id).label.is_pres(); }

// One pass of both normalization steps; true when something changed.
bool normalize_once(DGraph& g, const std::string& xi, int& next) {
  bool changed = false;
  std::set<int> root_xi;
  for (const auto& e : g.at(g.root).out)
    if (g.at(e.to).label.is_letter(xi)) root_xi.insert(e.to);

  std::vector<std::pair<int, DNode>> fresh;
  for (auto& [id, n] : g.nodes) {
    if (id == g.root) continue;
    std::map<std::pair<int, bool>, int> replaced;
    for (auto& e : n.out) {
      if (!root_xi.count(e.to)) continue;
      auto key = std::make_pair(e.to, e.special);
      auto it = replaced.find(key);
      if (it == replaced.end()) {
        it = replaced.emplace(key, next++).first;
        fresh.push_back({it->second, DNode{NodeLabel::of_letter(xi), {}}});
      }
      e = OutEdge{it->second, false};
      changed = true;
    }
  }
  for (auto& [id, n] : fresh) g.nodes.emplace(id, std::move(n));

  fresh.clear();
  for (auto& [id, n] : g.nodes) {
    if (!n.label.is_pres()) continue;
    std::vector<int> pos;
    for (std::size_t k = 0; k < n.out.size(); ++k)
      if (g.at(n.out[k].to).label.is_letter(xi)) pos.push_back(static_cast<int>(k) + 1);
    if (pos.size() < 2) continue;
    int n0 = next++;
    fresh.push_back({n0, DNode{NodeLabel::of_letter(xi), {}}});
    n.label.set = merge_coordinates(n.label.set, pos);
    std::vector<OutEdge> out{OutEdge{n0, false}};
    for (std::size_t k = 0; k < n.out.size(); ++k)
      if (!std::count(pos.begin(), pos.end(), static_cast<int>(k) + 1)) out.push_back(n.out[k]);
    n.out = std::move(out);
    changed = true;
  }
  for (auto& [id, n] : fresh) g.nodes.emplace(id, std::move(n));
  return changed;
}

class Builder {
 public:
  explicit Builder(std::set<std::string> binders) : binders_(std::move(binders)) {}

  DGraph run(const ExprP& e) {
    switch (e->kind) {
      case K::Empty:
        return single(NodeLabel::of_set(SemiLinear::empty(0)));
      case K::Eps:
        return single(NodeLabel::of_set(SemiLinear::point({})));
      case K::Letter:
        return single(NodeLabel::of_letter(e->letter));
      case K::Or:
      case K::Par: {
        std::vector<DGraph> parts;
        for (const auto& k : e->kids) parts.push_back(run(k));
        int dim = static_cast<int>(parts.size());
        SemiLinear s = e->kind == K::Par ? SemiLinear::point(Vec(dim, 1)) : SemiLinear::empty(dim);
        if (e->kind == K::Or)
          for (int i = 1; i <= dim; ++i) s = set_union(s, SemiLinear::unit(dim, i));
        return finish(pp_suppress(join(NodeLabel::of_set(s), parts)));
      }
      case K::Seq1:
      case K::Dia1:
      case K::Star1:
      case K::Omega1:
      case K::MOmega1:
      case K::Ord1:
      case K::MOrd1: {
        std::vector<DGraph> parts;
        for (const auto& k : e->kids) parts.push_back(run(k));
        return finish(join(NodeLabel::of_op(op_of(e->kind)), parts));
      }
      case K::Sub:
        return finish(substitute(e->letter, e->kids[0], e->kids[1]));
      case K::IStar:
        return finish(iterate(e->letter, e->kids[0]));
      default:
        throw ValidationFailed({std::string("not a >1 expression: ") + kind_name(e->kind)});
    }
  }

 private:
  std::set<std::string> binders_;
  int next_ = 1;

  static Op op_of(K k) {
    switch (k) {
      case K::Seq1: return Op::Seq1;
      case K::Dia1: return Op::Dia1;
      case K::Star1: return Op::Star1;
      case K::Omega1: return Op::Omega1;
      case K::MOmega1: return Op::MOmega1;
      case K::Ord1: return Op::Ord1;
      default: return Op::MOrd1;
    }
  }

  DGraph single(NodeLabel l) {
    DGraph d;
    d.root = next_++;
    d.nodes[d.root] = DNode{std::move(l), {}};
    return d;
  }

  // A new root over the disjoint union of the parts.
  DGraph join(NodeLabel l, const std::vector<DGraph>& parts) {
    DGraph d = single(std::move(l));
    for (const auto& p : parts) {
      d.nodes.insert(p.nodes.begin(), p.nodes.end());
      d.at(d.root).out.push_back(OutEdge{p.root, false});
    }
    return d;
  }

  DGraph finish(DGraph d) {
    for (const auto& x : binders_) {
      bool any = false;
      while (normalize_once(d, x, next_)) any = true;
      if (any) d = collect_garbage(d);
    }
    return d;
  }

  DGraph substitute(const std::string& xi, const ExprP& inner, const ExprP& outer) {
    if (outer->kind == K::Letter && outer->letter == xi) return run(inner);
    DGraph d1 = run(inner);
    DGraph d2 = run(outer);
    const DNode r1 = d1.at(d1.root);
    DGraph d = d2;
    d.nodes.insert(d1.nodes.begin(), d1.nodes.end());
    for (auto& [id, n] : d.nodes) {
      if (!d2.nodes.count(id) || !n.label.is_letter(xi)) continue;
      n.label = r1.label;
      n.out = r1.out;
    }
    return collect_garbage(pp_suppress(d));
  }

  DGraph iterate(const std::string& xi, const ExprP& body) {
    DGraph d = run(body);
    DNode& r = d.at(d.root);
    if (r.label.is_pres()) {
      int k = static_cast<int>(r.out.size()), at = 0;
      for (int i = 0; i < k && !at; ++i)
        if (d.at(r.out[i].to).label.is_letter(xi)) at = i + 1;
      if (at) {
        r.label.set = star_subst(r.label.set, at);
      } else {
        int x = next_++;
        r.label.set = set_union(pad(r.label.set, k + 1), SemiLinear::unit(k + 1, k + 1));
        r.out.push_back(OutEdge{x, false});
        d.nodes[x] = DNode{NodeLabel::of_letter(xi), {}};
      }
    } else {
      DGraph x = single(NodeLabel::of_letter(xi));
      d = join(NodeLabel::of_set(SemiLinear::points(2, {{1, 0}, {0, 1}})), {d, x});
    }

    const DNode root = d.at(d.root);
    std::set<int> root_kids;
    for (const auto& e : root.out) root_kids.insert(e.to);
    std::vector<OutEdge> copied = root.out;
    for (auto& e : copied) e.special = true;
    for (auto& [id, n] : d.nodes) {
      if (id == d.root || root_kids.count(id) || !n.label.is_letter(xi)) continue;
      n.label = root.label;
      n.out = copied;
    }
    return collect_garbage(pp_suppress(d));
  }
};

void check_arity(const DGraph& d, bool& ok) {
  for (const auto& [id, n] : d.nodes) {
    std::size_t want = 0;
    switch (n.label.kind) {
      case NodeLabel::Kind::Letter: want = 0; break;
      case NodeLabel::Kind::Pres: want = static_cast<std::size_t>(n.label.set.dim); break;
      case NodeLabel::Kind::Op: want = static_cast<std::size_t>(op_arity(n.label.op)); break;
    }
    if (n.out.size() != want) ok = false;
  }
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::Seq1: return "seq1";
    case Op::Star1: return "star1";
    case Op::Dia1: return "dia1";
    case Op::Omega1: return "omega1";
    case Op::MOmega1: return "momega1";
    case Op::Ord1: return "ord1";
    case Op::MOrd1: return "mord1";
  }
  return "?";
}

int op_arity(Op op) { return op == Op::Seq1 || op == Op::Dia1 ? 2 : 1; }

NodeLabel NodeLabel::of_letter(std::string a) {
  NodeLabel l;
  l.kind = Kind::Letter;
  l.letter = std::move(a);
  return l;
}

NodeLabel NodeLabel::of_set(SemiLinear s) {
  NodeLabel l;
  l.kind = Kind::Pres;
  l.set = std::move(s);
  return l;
}

NodeLabel NodeLabel::of_op(spkit::Op o) {
  NodeLabel l;
  l.kind = Kind::Op;
  l.op = o;
  return l;
}

bool NodeLabel::operator==(const NodeLabel& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Letter: return letter == o.letter;
    case Kind::Pres: return set == o.set;
    case Kind::Op: return op == o.op;
  }
  return false;
}

const DNode& DGraph::at(int id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw Error("no node " + std::to_string(id));
  return it->second;
}

DNode& DGraph::at(int id) {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw Error("no node " + std::to_string(id));
  return it->second;
}

DGraph collect_garbage(const DGraph& d) {
  DGraph g;
  g.root = d.root;
  for (int id : reachable(d, false)) g.nodes[id] = d.at(id);
  return g;
}

DGraph renumber(const DGraph& d) {
  std::map<int, int> ids;
  std::vector<int> order;
  std::function<void(int)> visit = [&](int n) {
    if (ids.count(n)) return;
    ids[n] = static_cast<int>(order.size()) + 1;
    order.push_back(n);
    for (const auto& e : d.at(n).out)
      if (!e.special) visit(e.to);
  };
  visit(d.root);
  // Nodes only reachable through special edges still get a name.
  for (int n : reachable(d, false)) visit(n);
  DGraph g;
  g.root = 1;
  for (int old : order) {
    DNode n = d.at(old);
    for (auto& e : n.out) e.to = ids.at(e.to);
    g.nodes[ids[old]] = std::move(n);
  }
  return g;
}

DGraph xi_normalize(const DGraph& d, const std::string& xi) {
  DGraph g = d;
  bool any = false;
  int next = max_id(g) + 1;
  while (normalize_once(g, xi, next)) any = true;
  return any ? collect_garbage(g) : g;
}

DGraph pp_suppress(const DGraph& d) {
  for (const auto& [id, n] : d.nodes) {
    if (!n.label.is_pres()) continue;
    for (const auto& e1 : n.out) {
      if (!d.nodes.count(e1.to) || !is_pres(d, e1.to)) continue;
      for (const auto& e2 : d.at(e1.to).out)
        if (is_pres(d, e2.to))
          throw PreconditionViolated("three consecutive set-labelled nodes at " + std::to_string(id));
    }
  }
  DGraph g = d;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [id, p] : g.nodes) {
      if (!p.label.is_pres()) continue;
      for (std::size_t k = 0; k < p.out.size(); ++k) {
        int t = p.out[k].to;
        if (t == id || !is_pres(g, t)) continue;
        const DNode child = g.at(t);
        p.label.set = subst_disjoint(child.label.set, p.label.set, static_cast<int>(k) + 1);
        std::vector<OutEdge> out(p.out.begin(), p.out.begin() + static_cast<long>(k));
        out.insert(out.end(), child.out.begin(), child.out.end());
        out.insert(out.end(), p.out.begin() + static_cast<long>(k) + 1, p.out.end());
        p.out = std::move(out);
        changed = true;
        break;
      }
      if (changed) break;
    }
  }
  return collect_garbage(g);
}

DGraph build(const ExprP& gt1) {
  if (!is_gt1(gt1)) throw ValidationFailed({"not a >1 expression: " + to_text(gt1)});
  Builder b(binders(gt1));
  return renumber(collect_garbage(b.run(gt1)));
}

DGraph build_rational(const ExprP& e, bool check) { return build(to_gt1(e, check)); }

PropertyReport check_properties(const DGraph& d, const std::set<std::string>& binders) {
  PropertyReport r;
  r.pp = r.ss = r.dag = r.xi_normalized = r.arity = true;
  for (const auto& [id, n] : d.nodes)
    for (const auto& e : n.out) {
      bool tp = is_pres(d, e.to);
      if (tp && n.label.is_pres()) r.pp = false;
      if (tp && e.special) r.ss = false;
    }

  std::map<int, int> colour;
  std::function<bool(int)> acyclic = [&](int n) {
    colour[n] = 1;
    for (const auto& e : d.at(n).out) {
      if (e.special) continue;
      int c = colour[e.to];
      if (c == 1) return false;
      if (c == 0 && !acyclic(e.to)) return false;
    }
    colour[n] = 2;
    return true;
  };
  for (const auto& [id, n] : d.nodes)
    if (colour[id] == 0 && !acyclic(id)) r.dag = false;

  for (const auto& xi : binders) {
    std::set<int> root_xi;
    for (const auto& e : d.at(d.root).out)
      if (d.at(e.to).label.is_letter(xi)) root_xi.insert(e.to);
    for (const auto& [id, n] : d.nodes) {
      int count = 0;
      for (const auto& e : n.out) {
        if (id != d.root && root_xi.count(e.to)) r.xi_normalized = false;
        if (d.at(e.to).label.is_letter(xi)) ++count;
      }
      if (n.label.is_pres() && count > 1) r.xi_normalized = false;
    }
  }
  check_arity(d, r.arity);
  return r;
}

bool xi_series_check(const DGraph& d, const std::string& xi) {
  if (d.nodes.size() == 1) return d.at(d.root).label.is_letter(xi);
  std::set<int> seen{d.root};
  std::vector<int> stack{d.root};
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    const DNode& n = d.at(s);
    for (std::size_t k = 0; k < n.out.size(); ++k) {
      if (n.label.is_pres()) {
        Vec u(n.label.set.dim, 0);
        u[k] = 1;
        if (!member(n.label.set, u)) continue;
      }
      int t = n.out[k].to;
      if (d.at(t).label.is_letter(xi)) return true;
      if (seen.insert(t).second) stack.push_back(t);
    }
  }
  return false;
}

bool root_accepts_empty(const DGraph& d) {
  const NodeLabel& l = d.at(d.root).label;
  return l.is_pres() && contains_zero(l.set);
}

bool special_edges_gated(const DGraph& d) {
  std::set<std::pair<int, bool>> seen{{d.root, false}};
  std::deque<std::pair<int, bool>> todo{{d.root, false}};
  while (!todo.empty()) {
    auto [s, gated] = todo.front();
    todo.pop_front();
    const DNode& n = d.at(s);
    for (std::size_t k = 0; k < n.out.size(); ++k) {
      bool g = gated;
      if (n.label.is_pres()) {
        Vec u(n.label.set.dim, 0);
        u[k] = 1;
        if (!member(n.label.set, u)) g = true;
      }
      if (n.out[k].special && !g) return false;
      if (seen.insert({n.out[k].to, g}).second) todo.push_back({n.out[k].to, g});
    }
  }
  return true;
}

std::string label_text(const NodeLabel& l) {
  switch (l.kind) {
    case NodeLabel::Kind::Letter: return l.letter;
    case NodeLabel::Kind::Pres: return to_text(l.set);
    case NodeLabel::Kind::Op: return op_name(l.op);
  }
  return "?";
}

std::string to_dot(const DGraph& d) {
  std::ostringstream os;
  os << "digraph D {\n";
  for (const auto& [id, n] : d.nodes) {
    os << "  n" << id << " [label=\"n" << id << ": " << dot_escape(label_text(n.label)) << "\"";
    if (n.label.is_pres()) os << ", shape=box";
    if (id == d.root) os << ", penwidth=2";
    os << "];\n";
  }
  for (const auto& [id, n] : d.nodes)
    for (std::size_t k = 0; k < n.out.size(); ++k) {
      os << "  n" << id << " -> n" << n.out[k].to << " [label=\"" << k + 1 << "\"";
      if (n.out[k].special) os << ", style=dashed";
      os << "];\n";
    }
  os << "}\n";
  return os.str();
}

nlohmann::json to_json(const DGraph& d) {
  nlohmann::json nodes = nlohmann::json::array(), out = nlohmann::json::object();
  for (const auto& [id, n] : d.nodes) {
    nlohmann::json label;
    switch (n.label.kind) {
      case NodeLabel::Kind::Letter: label = {{"kind", "letter"}, {"value", n.label.letter}}; break;
      case NodeLabel::Kind::Pres: label = {{"kind", "pres"}, {"value", to_json(n.label.set)}}; break;
      case NodeLabel::Kind::Op: label = {{"kind", "op"}, {"value", op_name(n.label.op)}}; break;
    }
    nodes.push_back({{"id", id}, {"label", label}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : n.out) edges.push_back({{"to", e.to}, {"special", e.special}});
    out[std::to_string(id)] = edges;
  }
  return {{"root", d.root}, {"nodes", nodes}, {"out", out}};
}

DGraph dgraph_from_json(const nlohmann::json& j) {
  try {
    DGraph d;
    d.root = j.at("root").get<int>();
    for (const auto& n : j.at("nodes")) {
      int id = n.at("id").get<int>();
      const auto& l = n.at("label");
      std::string kind = l.at("kind").get<std::string>();
      DNode node;
      if (kind == "letter") {
        node.label = NodeLabel::of_letter(l.at("value").get<std::string>());
      } else if (kind == "pres") {
        node.label = NodeLabel::of_set(semilinear_from_json(l.at("value")));
      } else if (kind == "op") {
        std::string v = l.at("value").get<std::string>();
        bool found = false;
        for (Op o : {Op::Seq1, Op::Star1, Op::Dia1, Op::Omega1, Op::MOmega1, Op::Ord1, Op::MOrd1})
          if (v == op_name(o)) {
            node.label = NodeLabel::of_op(o);
            found = true;
          }
        if (!found) throw Error("unknown operator label " + v);
      } else {
        throw Error("unknown label kind " + kind);
      }
      d.nodes[id] = std::move(node);
    }
    for (auto& [id, n] : d.nodes) {
      auto key = std::to_string(id);
      if (!j.at("out").contains(key)) continue;
      for (const auto& e : j.at("out").at(key)) {
        OutEdge oe{e.at("to").get<int>(), e.value("special", false)};
        if (!d.nodes.count(oe.to)) throw Error("edge to unknown node " + std::to_string(oe.to));
        n.out.push_back(oe);
      }
    }
    if (!d.nodes.count(d.root)) throw Error("root is not a node");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad graph document: ") + e.what());
  }
}

}  // namespace spkit
