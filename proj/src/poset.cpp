#include "spkit/poset.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <unordered_map>

namespace spkit {

namespace {

bool reserved_word(std::string_view w) { return w == "eps" || w == "seq" || w == "par"; }

void append_flat(std::vector<SPTerm>& out, SPTerm t, SPTerm::Kind flat) {
  if (t.kind == SPTerm::Kind::Empty) return;
  if (t.kind == flat) {
    for (auto& k : t.kids) out.push_back(std::move(k));
  } else {
    out.push_back(std::move(t));
  }
}

SPTerm make_node(SPTerm::Kind kind, std::vector<SPTerm> parts) {
  std::vector<SPTerm> flat;
  for (auto& p : parts) append_flat(flat, std::move(p), kind);
  if (flat.empty()) return SPTerm::eps();
  if (flat.size() == 1) return std::move(flat.front());
  if (kind == SPTerm::Kind::Par) {
    std::sort(flat.begin(), flat.end(),
              [](const SPTerm& a, const SPTerm& b) { return a.text() < b.text(); });
  }
  SPTerm t;
  t.kind = kind;
  t.kids = std::move(flat);
  return t;
}

}  // namespace

SPTerm SPTerm::atom(std::string a) {
  SPTerm t;
  t.kind = Kind::Letter;
  t.letter = std::move(a);
  return t;
}

SPTerm SPTerm::seq(std::vector<SPTerm> parts) { return make_node(Kind::Seq, std::move(parts)); }
SPTerm SPTerm::par(std::vector<SPTerm> parts) { return make_node(Kind::Par, std::move(parts)); }

int SPTerm::size() const {
  switch (kind) {
    case Kind::Empty:
      return 0;
    case Kind::Letter:
      return 1;
    default: {
      int s = 0;
      for (const auto& k : kids) s += k.size();
      return s;
    }
  }
}

std::string SPTerm::text() const {
  if (!cache.empty()) return cache;
  std::string s;
  switch (kind) {
    case Kind::Empty:
      s = "eps";
      break;
    case Kind::Letter:
      s = letter;
      break;
    case Kind::Seq:
    case Kind::Par:
      s = kind == Kind::Seq ? "seq(" : "par(";
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i) s += ',';
        s += kids[i].text();
      }
      s += ')';
      break;
  }
  cache = s;
  return s;
}

bool SPTerm::operator<(const SPTerm& o) const {
  int a = size(), b = o.size();
  if (a != b) return a < b;
  return text() < o.text();
}

SPTerm canonicalize(const SPTerm& t) {
  switch (t.kind) {
    case SPTerm::Kind::Empty:
      return SPTerm::eps();
    case SPTerm::Kind::Letter:
      return SPTerm::atom(t.letter);
    default: {
      std::vector<SPTerm> kids;
      for (const auto& k : t.kids) kids.push_back(canonicalize(k));
      return make_node(t.kind, std::move(kids));
    }
  }
}

namespace {

struct TermParser {
  std::string_view s;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    std::size_t b = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    if (b == i) throw SyntaxError("expected identifier", b);
    return std::string(s.substr(b, i - b));
  }
  SPTerm term() {
    skip();
    std::size_t at = i;
    std::string w = ident();
    if (w == "eps") return SPTerm::eps();
    if (w == "seq" || w == "par") {
      if (!eat('(')) throw SyntaxError("expected '('", i);
      std::vector<SPTerm> kids;
      do kids.push_back(term());
      while (eat(','));
      if (!eat(')')) throw SyntaxError("expected ')'", i);
      if (kids.size() < 2) throw SyntaxError(w + " needs at least two operands", at);
      for (const auto& k : kids)
        if (k.empty()) throw SyntaxError("eps inside " + w, at);
      return w == "seq" ? SPTerm::seq(std::move(kids)) : SPTerm::par(std::move(kids));
    }
    if (std::isdigit(static_cast<unsigned char>(w[0]))) throw SyntaxError("bad letter", at);
    return SPTerm::atom(w);
  }
};

}  // namespace

SPTerm parse_term(std::string_view s) {
  TermParser p{s};
  SPTerm t = p.term();
  p.skip();
  if (p.i != s.size()) throw SyntaxError("trailing input", p.i);
  return t;
}

SPTerm seq_product(const SPTerm& a, const SPTerm& b) { return SPTerm::seq({a, b}); }
SPTerm par_product(const SPTerm& a, const SPTerm& b) { return SPTerm::par({a, b}); }

SPTerm substitute_letter(const SPTerm& t, const std::string& letter, const SPTerm& by) {
  switch (t.kind) {
    case SPTerm::Kind::Empty:
      return t;
    case SPTerm::Kind::Letter:
      return t.letter == letter ? by : t;
    default: {
      std::vector<SPTerm> kids;
      for (const auto& k : t.kids) kids.push_back(substitute_letter(k, letter, by));
      return make_node(t.kind, std::move(kids));
    }
  }
}

std::vector<SPTerm> seq_factorize(const SPTerm& t) {
  if (t.empty()) throw EmptyPoset();
  if (t.kind == SPTerm::Kind::Seq) return t.kids;
  return {t};
}

std::vector<SPTerm> par_factorize(const SPTerm& t) {
  if (t.empty()) throw EmptyPoset();
  if (t.kind == SPTerm::Kind::Par) return t.kids;
  return {t};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Mask> components(Mask m, const std::function<Mask(int)>& adj) {
  std::vector<Mask> out;
  while (m) {
    Mask comp = bit(lowest(m)), frontier = comp;
    while (frontier) {
      int v = lowest(frontier);
      frontier &= frontier - 1;
      Mask nb = adj(v) & m & ~comp;
      comp |= nb;
      frontier |= nb;
    }
    out.push_back(comp);
    m &= ~comp;
  }
  return out;
}

}  // namespace

std::vector<Mask> Poset::par_components(Mask m) const {
  return components(m, [&](int v) { return above[v] | below[v]; });
}

std::vector<Mask> Poset::seq_factors(Mask m) const {
  if (popcount(m) <= 1) return {m};
  if (par_components(m).size() > 1) return {m};
  auto parts = components(m, [&](int v) { return ~(above[v] | below[v] | bit(v)); });
  // Series factors are totally ordered; sort by the number of elements below.
  std::sort(parts.begin(), parts.end(), [&](Mask a, Mask b) {
    int x = lowest(a), y = lowest(b);
    return less(x, y);
  });
  return parts;
}

bool Poset::is_sequential(Mask m) const { return popcount(m) >= 1 && par_components(m).size() == 1; }

namespace {

// Recursive decomposition; `order` receives the poset indices in the
// preorder of the produced canonical term.
SPTerm decompose(const Poset& p, Mask m, std::vector<int>& order,
                 const std::vector<std::string>* ids) {
  if (m == 0) return SPTerm::eps();
  if (popcount(m) == 1) {
    int v = lowest(m);
    order.push_back(v);
    return SPTerm::atom(p.label[v]);
  }
  auto comps = p.par_components(m);
  bool parallel = comps.size() > 1;
  std::vector<Mask> parts = parallel ? comps : p.seq_factors(m);
  if (!parallel && parts.size() == 1) {
    // Indecomposable block: find an N to report.
    std::vector<int> el;
    for_each_bit(m, [&](int v) { el.push_back(v); });
    for (int a : el)
      for (int b : el)
        for (int c : el)
          for (int d : el) {
            if (p.less(a, b) && p.less(c, b) && p.less(c, d) && !p.comparable(a, c) &&
                !p.comparable(a, d) && !p.comparable(b, d)) {
              auto name = [&](int v) { return ids ? (*ids)[v] : std::to_string(v); };
              throw NotSeriesParallel({name(a), name(b), name(c), name(d)});
            }
          }
    throw NotSeriesParallel({});
  }
  std::vector<std::pair<SPTerm, std::vector<int>>> kids;
  for (Mask part : parts) {
    std::vector<int> sub;
    SPTerm t = decompose(p, part, sub, ids);
    kids.emplace_back(std::move(t), std::move(sub));
  }
  if (parallel) {
    std::stable_sort(kids.begin(), kids.end(), [](const auto& a, const auto& b) {
      return a.first.text() < b.first.text();
    });
  }
  std::vector<SPTerm> terms;
  for (auto& [t, sub] : kids) {
    order.insert(order.end(), sub.begin(), sub.end());
    terms.push_back(std::move(t));
  }
  // Children are already flattened, so building the node directly keeps the
  // order vector aligned with the preorder.
  SPTerm t;
  t.kind = parallel ? SPTerm::Kind::Par : SPTerm::Kind::Seq;
  t.kids = std::move(terms);
  return t;
}

int fill(const SPTerm& t, Poset& p, int next) {
  switch (t.kind) {
    case SPTerm::Kind::Empty:
      return next;
    case SPTerm::Kind::Letter:
      p.label[next] = t.letter;
      return next + 1;
    case SPTerm::Kind::Par: {
      for (const auto& k : t.kids) next = fill(k, p, next);
      return next;
    }
    case SPTerm::Kind::Seq: {
      std::vector<std::pair<int, int>> ranges;
      for (const auto& k : t.kids) {
        int b = next;
        next = fill(k, p, next);
        ranges.emplace_back(b, next);
      }
      for (std::size_t a = 0; a < ranges.size(); ++a)
        for (std::size_t b = a + 1; b < ranges.size(); ++b)
          for (int i = ranges[a].first; i < ranges[a].second; ++i)
            for (int j = ranges[b].first; j < ranges[b].second; ++j) {
              p.above[i] |= bit(j);
              p.below[j] |= bit(i);
            }
      return next;
    }
  }
  return next;
}

}  // namespace

SPTerm Poset::term(Mask m) const {
  std::vector<int> order;
  return decompose(*this, m, order, nullptr);
}

bool Poset::is_factor(Mask within, Mask f) const {
  if (f == 0 || (f & ~within)) return false;
  Mask rest = within & ~f;
  for (int z = 0; z < n; ++z) {
    if (!((rest >> z) & 1)) continue;
    Mask up = above[z] & f, down = below[z] & f;
    if ((up != 0 && up != f) || (down != 0 && down != f)) return false;
    // z between two elements of f breaks convexity
    if (up && down) return false;
  }
  return true;
}

int Poset::find_label(const std::string& a) const {
  for (int i = 0; i < n; ++i)
    if (label[i] == a) return i;
  return -1;
}

Mask Poset::mask_of(const std::vector<std::string>& labels) const {
  Mask m = 0;
  for (const auto& l : labels) {
    int i = find_label(l);
    if (i < 0) throw Error("no element labelled " + l);
    m |= bit(i);
  }
  return m;
}

Poset to_poset(const SPTerm& t) {
  Poset p;
  p.n = t.size();
  if (p.n > kMaxElements) throw ResourceBound("poset larger than 64 elements");
  p.label.assign(p.n, "");
  p.above.assign(p.n, 0);
  p.below.assign(p.n, 0);
  fill(t, p, 0);
  return p;
}

// ---------------------------------------------------------------------------

namespace {

std::string id_string(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw InvalidRelation("element ids must be strings or integers");
}

}  // namespace

PosetRelation relation_from_json(const nlohmann::json& j) {
  PosetRelation r;
  for (const auto& e : j.at("elements")) r.elements.push_back(id_string(e));
  if (j.contains("order"))
    for (const auto& pr : j.at("order")) {
      if (!pr.is_array() || pr.size() != 2) throw InvalidRelation("order pairs must have two ids");
      r.order.emplace_back(id_string(pr[0]), id_string(pr[1]));
    }
  if (j.contains("labels"))
    for (const auto& [k, v] : j.at("labels").items()) r.labels[k] = v.get<std::string>();
  return r;
}

nlohmann::json to_json(const PosetRelation& r) {
  nlohmann::json j;
  j["elements"] = r.elements;
  j["order"] = nlohmann::json::array();
  for (const auto& [a, b] : r.order) j["order"].push_back({a, b});
  j["labels"] = r.labels;
  return j;
}

PosetRelation to_relation(const SPTerm& t) {
  Poset p = to_poset(t);
  PosetRelation r;
  for (int i = 0; i < p.n; ++i) {
    r.elements.push_back(std::to_string(i));
    r.labels[std::to_string(i)] = p.label[i];
  }
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j)
      if (p.less(i, j)) r.order.emplace_back(std::to_string(i), std::to_string(j));
  return r;
}

namespace {

Poset poset_of_relation(const PosetRelation& r, std::vector<std::string>& ids) {
  std::unordered_map<std::string, int> idx;
  for (const auto& e : r.elements) {
    if (!idx.emplace(e, static_cast<int>(ids.size())).second)
      throw InvalidRelation("duplicate element " + e);
    ids.push_back(e);
  }
  Poset p;
  p.n = static_cast<int>(ids.size());
  if (p.n > kMaxElements) throw ResourceBound("poset larger than 64 elements");
  p.label.assign(p.n, "");
  p.above.assign(p.n, 0);
  p.below.assign(p.n, 0);
  for (int i = 0; i < p.n; ++i) {
    auto it = r.labels.find(ids[i]);
    if (it == r.labels.end()) throw InvalidRelation("element " + ids[i] + " has no label");
    if (it->second.empty() || reserved_word(it->second)) throw InvalidRelation("bad label " + it->second);
    p.label[i] = it->second;
  }
  for (const auto& [a, b] : r.order) {
    auto ia = idx.find(a), ib = idx.find(b);
    if (ia == idx.end() || ib == idx.end()) throw InvalidRelation("unknown element in order");
    if (ia->second == ib->second) throw InvalidRelation("order is not irreflexive at " + a);
    p.above[ia->second] |= bit(ib->second);
    p.below[ib->second] |= bit(ia->second);
  }
  for (int i = 0; i < p.n; ++i) {
    if (p.above[i] & p.below[i]) throw InvalidRelation("order is not asymmetric at " + ids[i]);
    Mask up = p.above[i];
    for_each_bit(up, [&](int j) {
      if ((p.above[j] & ~p.above[i]) != 0)
        throw InvalidRelation("order is not transitive at " + ids[i] + "<" + ids[j]);
    });
  }
  return p;
}

}  // namespace

void validate_relation(const PosetRelation& r) {
  std::vector<std::string> ids;
  poset_of_relation(r, ids);
}

Decomposition sp_decompose_ids(const PosetRelation& r) {
  std::vector<std::string> ids;
  Poset p = poset_of_relation(r, ids);
  std::vector<int> order;
  Decomposition d;
  d.term = decompose(p, p.all(), order, &ids);
  for (int v : order) d.ids.push_back(ids[v]);
  return d;
}

SPTerm sp_decompose(const PosetRelation& r) { return sp_decompose_ids(r).term; }

// ---------------------------------------------------------------------------

namespace {

void sorted_unique(std::vector<Mask>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void collect_sequential(const Poset& p, Mask m, std::vector<Mask>& out) {
  if (popcount(m) == 1) {
    out.push_back(m);
    return;
  }
  auto comps = p.par_components(m);
  if (comps.size() > 1) {
    for (Mask c : comps) collect_sequential(p, c, out);
    return;
  }
  auto fs = p.seq_factors(m);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    Mask run = fs[i];
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      run |= fs[j];
      out.push_back(run);
    }
    collect_sequential(p, fs[i], out);
  }
}

void collect_ms(const Poset& p, Mask m, bool parent_seq, std::vector<Mask>& out) {
  if (popcount(m) == 1) {
    if (!parent_seq) out.push_back(m);
    return;
  }
  auto comps = p.par_components(m);
  if (comps.size() > 1) {
    for (Mask c : comps) collect_ms(p, c, false, out);
    return;
  }
  out.push_back(m);
  for (Mask f : p.seq_factors(m)) collect_ms(p, f, true, out);
}

void collect_all(const Poset& p, Mask m, std::vector<Mask>& out) {
  out.push_back(m);
  if (popcount(m) == 1) return;
  auto comps = p.par_components(m);
  if (comps.size() > 1) {
    std::size_t k = comps.size();
    if (k > 20) throw ResourceBound("too many parallel components for factor enumeration");
    for (std::size_t sel = 1; sel + 1 < (std::size_t{1} << k); ++sel) {
      if (std::popcount(sel) < 2) continue;
      Mask u = 0;
      for (std::size_t c = 0; c < k; ++c)
        if ((sel >> c) & 1) u |= comps[c];
      out.push_back(u);
    }
    for (Mask c : comps) collect_all(p, c, out);
    return;
  }
  auto fs = p.seq_factors(m);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    Mask run = fs[i];
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      run |= fs[j];
      if (run != m) out.push_back(run);
    }
    collect_all(p, fs[i], out);
  }
}

}  // namespace

std::vector<Mask> sequential_factors(const Poset& p, Mask within) {
  std::vector<Mask> out;
  if (within) collect_sequential(p, within, out);
  sorted_unique(out);
  return out;
}

std::vector<Mask> ms_factors(const Poset& p, Mask within) {
  std::vector<Mask> out;
  if (within) collect_ms(p, within, false, out);
  sorted_unique(out);
  return out;
}

std::vector<Mask> direct_ms_factors(const Poset& p, Mask within) {
  auto ms = ms_factors(p, within);
  std::vector<Mask> strict;
  for (Mask f : ms)
    if (f != within) strict.push_back(f);
  std::vector<Mask> out;
  for (Mask f : strict) {
    bool inner = false;
    for (Mask g : strict)
      if (g != f && (f & ~g) == 0) inner = true;
    if (!inner) out.push_back(f);
  }
  return out;
}

std::vector<Mask> all_factors(const Poset& p, Mask within) {
  std::vector<Mask> out;
  if (within) collect_all(p, within, out);
  sorted_unique(out);
  return out;
}

bool is_sequentially_maximal(const Poset& p, Mask within, Mask f) {
  if (!p.is_factor(within, f)) return false;
  for (Mask g : all_factors(p, within)) {
    if (g == f || (f & ~g)) continue;
    bool extends = true;
    for_each_bit(g & ~f, [&](int x) {
      Mask up = p.above[x] & f, down = p.below[x] & f;
      if (up != f && down != f) extends = false;
    });
    if (extends) return false;
  }
  return true;
}

FactorReport factors(const SPTerm& t) {
  Poset p = to_poset(t);
  return {sequential_factors(p, p.all()), ms_factors(p, p.all()), direct_ms_factors(p, p.all())};
}

// ---------------------------------------------------------------------------

std::vector<SPTerm> enumerate_posets(const std::vector<std::string>& alphabet, int n,
                                     std::size_t ceiling) {
  std::set<std::string> letters(alphabet.begin(), alphabet.end());
  std::vector<std::vector<SPTerm>> seq_irr(n + 1), par_irr(n + 1), all(n + 1);
  std::size_t total = 1;
  auto bump = [&](std::size_t k) {
    total += k;
    if (total > ceiling) throw ResourceBound("poset enumeration exceeds " + std::to_string(ceiling));
  };

  for (int k = 1; k <= n; ++k) {
    std::vector<SPTerm> seqs, pars;
    if (k == 1) {
      for (const auto& a : letters) {
        seq_irr[1].push_back(SPTerm::atom(a));
        par_irr[1].push_back(SPTerm::atom(a));
      }
    }
    // Sequences of >= 2 seq-irreducible parts with sizes summing to k.
    std::vector<SPTerm> cur;
    std::function<void(int)> gen_seq = [&](int left) {
      if (left == 0) {
        if (cur.size() >= 2) {
          seqs.push_back(SPTerm::seq(cur));
          bump(1);
        }
        return;
      }
      for (int s = 1; s <= left; ++s) {
        if (s == k) continue;
        for (const auto& t : seq_irr[s]) {
          cur.push_back(t);
          gen_seq(left - s);
          cur.pop_back();
        }
      }
    };
    gen_seq(k);
    // Multisets of >= 2 par-irreducible parts, chosen in non-decreasing
    // (size, index) order.
    std::function<void(int, int, std::size_t)> gen_par = [&](int left, int min_size,
                                                            std::size_t min_idx) {
      if (left == 0) {
        if (cur.size() >= 2) {
          pars.push_back(SPTerm::par(cur));
          bump(1);
        }
        return;
      }
      for (int s = min_size; s <= left; ++s) {
        if (s == k) continue;
        for (std::size_t i = (s == min_size ? min_idx : 0); i < par_irr[s].size(); ++i) {
          cur.push_back(par_irr[s][i]);
          gen_par(left - s, s, i);
          cur.pop_back();
        }
      }
    };
    gen_par(k, 1, 0);
    for (auto& t : pars) seq_irr[k].push_back(t);
    for (auto& t : seqs) par_irr[k].push_back(t);
    if (k == 1) {
      all[1] = seq_irr[1];
      bump(all[1].size());
    } else {
      all[k] = std::move(seqs);
      all[k].insert(all[k].end(), pars.begin(), pars.end());
    }
    std::sort(all[k].begin(), all[k].end(),
              [](const SPTerm& a, const SPTerm& b) { return a.text() < b.text(); });
  }
  std::vector<SPTerm> out{SPTerm::eps()};
  for (int k = 1; k <= n; ++k) out.insert(out.end(), all[k].begin(), all[k].end());
  return out;
}

}  // namespace spkit
