#include "spkit/coloring.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace spkit {

namespace {

bool contains(Mask m, int i) { return (m >> i) & 1; }
bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

int component_of(const std::vector<Mask>& comps, int x) {
  for (std::size_t k = 0; k < comps.size(); ++k)
    if (contains(comps[k], x)) return static_cast<int>(k);
  return -1;
}

// Seq factors of g that are parallel, each with its components.
struct ParFactor {
  Mask all;
  std::vector<Mask> comps;
};

std::vector<ParFactor> parallel_factors(const Poset& p, Mask g) {
  std::vector<ParFactor> out;
  if (popcount(g) < 2) return out;
  auto fs = p.seq_factors(g);
  if (fs.size() < 2) return out;
  for (Mask q : fs)
    if (popcount(q) > 1) out.push_back({q, p.par_components(q)});
  return out;
}

bool spans_two(const std::vector<Mask>& comps, Mask m) {
  int seen = 0;
  for (Mask c : comps)
    if (m & c) ++seen;
  return seen >= 2;
}

bool other_component_has(const std::vector<Mask>& comps, int x, Mask m) {
  int k = component_of(comps, x);
  return k >= 0 && (m & ~comps[k]) != 0;
}

std::vector<Mask> strict_ms_below(const Poset& p, Mask f) {
  std::vector<Mask> out;
  for (Mask g : ms_factors(p, f))
    if (g != f) out.push_back(g);
  return out;
}

// Some strictly smaller ms-factor splits in a way that shadows the triple.
bool shadowed(const Poset& p, const std::vector<Mask>& below, const MsEncoding& enc, Color c,
              const Triple& t) {
  for (Mask g : below) {
    for (const auto& q : parallel_factors(p, g)) {
      Mask pc = enc.p[c] & q.all;
      bool s_outside = (enc.s[c] & g & ~q.all) != 0;
      if (contains(g & ~q.all, t.y) && spans_two(q.comps, pc)) return true;
      if (!s_outside) continue;
      if (contains(q.all, t.x) && other_component_has(q.comps, t.x, pc)) return true;
      if (contains(q.all, t.x2) && other_component_has(q.comps, t.x2, pc)) return true;
    }
  }
  return false;
}

std::vector<Triple> directly_bound_in(const Poset& p, Mask f, const std::vector<Mask>& below,
                                      const MsEncoding& enc, Color c) {
  std::vector<Triple> out;
  for (const auto& q : parallel_factors(p, f)) {
    Mask pc = enc.p[c] & q.all;
    Mask rest = f & ~q.all;
    Mask ys = enc.s[c] & rest;
    if (!ys || popcount(pc) < 2) continue;
    for_each_bit(pc, [&](int x) {
      for_each_bit(pc & ~(bit(x + 1) - 1), [&](int x2) {
        if (component_of(q.comps, x) == component_of(q.comps, x2)) return;
        for_each_bit(ys, [&](int y) {
          Mask loose = rest & ~bit(y) & ~(p.above[y] | p.below[y]);
          if (!loose) return;
          Triple t{y, x, x2};
          if (!shadowed(p, below, enc, c, t)) out.push_back(t);
        });
      });
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class Pred>
bool bound_with(const Poset& p, Mask f, const MsEncoding& enc, Color c, Pred pred) {
  for (Mask g : ms_factors(p, f)) {
    if (!subset(g, f)) continue;
    for (const Triple& t : directly_bound(p, g, enc, c))
      if (pred(t)) return true;
  }
  return false;
}

void require_ms(const Poset& p, Mask f) {
  auto ms = ms_factors(p, p.all());
  if (!std::binary_search(ms.begin(), ms.end(), f)) throw NotMsFactor("not a sequentially maximal sequential factor");
}

std::optional<Color> decode_ms(const Poset& p, Mask f, const MsEncoding& enc) {
  auto fs = p.seq_factors(f);
  Mask singles = 0;
  for (Mask q : fs)
    if (popcount(q) == 1) singles |= q;
  std::vector<Color> colors;
  if (singles) {
    Mask cands = 0;
    for (Color c = 0; c < enc.colors; ++c) cands |= enc.w[c] & singles;
    if (popcount(cands) != 1) return std::nullopt;
    for (Color c = 0; c < enc.colors; ++c)
      if (enc.w[c] & cands) colors.push_back(c);
  } else {
    auto below = strict_ms_below(p, f);
    std::set<Triple> cands;
    for (Color c = 0; c < enc.colors; ++c)
      for (const Triple& t : directly_bound_in(p, f, below, enc, c)) cands.insert(t);
    if (cands.size() != 1) return std::nullopt;
    const Triple& t = *cands.begin();
    for (Color c = 0; c < enc.colors; ++c)
      if (contains(enc.s[c], t.y) && contains(enc.p[c], t.x) && contains(enc.p[c], t.x2))
        colors.push_back(c);
  }
  if (colors.size() != 1) return std::nullopt;
  return colors[0];
}

class MsEncoder {
 public:
  MsEncoder(const Poset& p, const std::map<Mask, Color>& coloring, int colors)
      : p_(p), coloring_(coloring), enc_(colors) {}

  MsEncoding run() {
    auto top = p_.par_components(p_.all());
    if (p_.n == 0) return enc_;
    for (Mask c : top) encode(c);
    return enc_;
  }

 private:
  const Poset& p_;
  const std::map<Mask, Color>& coloring_;
  MsEncoding enc_;

  Color wanted(Mask f) const { return coloring_.at(f); }

  void encode(Mask f) {
    Color e = wanted(f);
    if (popcount(f) == 1) {
      enc_.w[e] |= f;
      return;
    }
    auto fs = p_.seq_factors(f);
    for (Mask q : fs)
      if (popcount(q) > 1)
        for (Mask c : p_.par_components(q)) encode(c);
    for (Mask q : fs)
      if (popcount(q) == 1) {
        enc_.w[e] |= q;
        return;
      }
    encode_triple(f, fs, e);
  }

  bool sub_colors_kept(const MsEncoding& trial, const std::vector<Mask>& below) const {
    for (Mask g : below)
      if (decode_ms(p_, g, trial) != std::optional<Color>(wanted(g))) return false;
    return true;
  }

  // Least (y, x, x2) with y s-free and x, x2 p-free that colours f in e and
  // leaves every smaller ms-factor as it was.
  void encode_triple(Mask f, const std::vector<Mask>& fs, Color e) {
    auto below = strict_ms_below(p_, f);
    auto factor_of = [&](int i) {
      for (std::size_t k = 0; k < fs.size(); ++k)
        if (contains(fs[k], i)) return static_cast<int>(k);
      return -1;
    };
    std::vector<int> s_ok, p_ok;
    for_each_bit(f, [&](int i) {
      if (s_free(p_, f, enc_, e, i)) s_ok.push_back(i);
      if (p_free(p_, f, enc_, e, i)) p_ok.push_back(i);
    });
    for (int y : s_ok) {
      for (std::size_t a = 0; a < p_ok.size(); ++a) {
        int x = p_ok[a];
        int j = factor_of(x);
        if (j == factor_of(y)) continue;
        auto comps = p_.par_components(fs[j]);
        for (std::size_t b = a + 1; b < p_ok.size(); ++b) {
          int x2 = p_ok[b];
          if (factor_of(x2) != j || component_of(comps, x) == component_of(comps, x2)) continue;
          MsEncoding trial = enc_;
          trial.s[e] |= bit(y);
          trial.p[e] |= bit(x) | bit(x2);
          if (decode_ms(p_, f, trial) != std::optional<Color>(e)) continue;
          if (!sub_colors_kept(trial, below)) continue;
          enc_ = std::move(trial);
          return;
        }
      }
    }
    throw VerificationFailed("no free triple for an ms-factor of " + p_.term(f).text());
  }
};

std::string subset_name(int mask, const std::vector<std::string>& names) {
  std::string s = "{";
  bool first = true;
  for (int c = 0; (mask >> c) != 0; ++c)
    if ((mask >> c) & 1) {
      s += (first ? "" : ",") + (c < static_cast<int>(names.size()) ? names[c] : "c" + std::to_string(c));
      first = false;
    }
  return s + "}";
}

nlohmann::json elements(Mask m) {
  nlohmann::json a = nlohmann::json::array();
  for_each_bit(m, [&](int i) { a.push_back(i); });
  return a;
}

bool sequentially_adjacent(const Poset& p, Mask a, Mask b) {
  if (a & b) return false;
  Mask u = a | b;
  if (!p.is_factor(p.all(), u) || !p.is_sequential(u)) return false;
  bool a_low = true, b_low = true;
  for_each_bit(a, [&](int i) {
    if (!subset(b, p.above[i])) a_low = false;
    if (!subset(b, p.below[i])) b_low = false;
  });
  return a_low || b_low;
}

}  // namespace

std::vector<Triple> directly_bound(const Poset& p, Mask f, const MsEncoding& enc, Color c) {
  return directly_bound_in(p, f, strict_ms_below(p, f), enc, c);
}

bool s_bound(const Poset& p, Mask f, const MsEncoding& enc, Color c, int y) {
  return bound_with(p, f, enc, c, [&](const Triple& t) { return t.y == y; });
}

bool p_bound(const Poset& p, Mask f, const MsEncoding& enc, Color c, int x) {
  return bound_with(p, f, enc, c, [&](const Triple& t) { return t.x == x || t.x2 == x; });
}

bool s_free(const Poset& p, Mask f, const MsEncoding& enc, Color c, int y) {
  MsEncoding e = enc;
  e.s[c] |= bit(y);
  return !s_bound(p, f, e, c, y);
}

bool p_free(const Poset& p, Mask f, const MsEncoding& enc, Color c, int x) {
  MsEncoding e = enc;
  e.p[c] |= bit(x);
  return !p_bound(p, f, e, c, x);
}

std::optional<Color> ms_color_of(const Poset& p, Mask f, const MsEncoding& enc) {
  require_ms(p, f);
  return decode_ms(p, f, enc);
}

bool completely_ms_colored(const Poset& p, const MsEncoding& enc) {
  for (Mask f : ms_factors(p, p.all()))
    if (!decode_ms(p, f, enc)) return false;
  return true;
}

MsEncoding encode_ms(const Poset& p, const std::map<Mask, Color>& coloring, int colors) {
  auto ms = ms_factors(p, p.all());
  for (Mask f : ms) {
    auto it = coloring.find(f);
    if (it == coloring.end()) throw PreconditionViolated("coloring misses the ms-factor " + p.term(f).text());
    if (it->second < 0 || it->second >= colors) throw PreconditionViolated("color out of range");
  }
  for (const auto& [f, c] : coloring)
    if (!std::binary_search(ms.begin(), ms.end(), f)) throw NotMsFactor("colored mask is not an ms-factor");
  return MsEncoder(p, coloring, colors).run();
}

std::vector<Color> s_colors_of(const Poset& p, Mask f, const SEncoding& enc) {
  auto seq = sequential_factors(p, p.all());
  if (!std::binary_search(seq.begin(), seq.end(), f)) throw NotSequentialFactor("not a sequential factor");

  std::map<std::pair<Mask, Color>, bool> memo;
  std::function<bool(Mask, Color)> holds = [&](Mask g, Color c) -> bool {
    auto key = std::make_pair(g, c);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool ok = true;
    for (Mask q : p.seq_factors(g)) {
      if (popcount(q) == 1) {
        ok = (enc.v[c] & q) != 0;
      } else {
        for (Mask comp : p.par_components(q)) {
          auto m = decode_ms(p, comp, enc.ms);
          if (!m || !((*m >> c) & 1)) ok = false;
        }
      }
      if (!ok) break;
    }
    // No longer sequential factor F' + g + F'' carries the same colour.
    if (ok)
      for (Mask h : seq) {
        if (h == g || !subset(g, h)) continue;
        bool extends = true;
        for_each_bit(h & ~g, [&](int z) {
          if (!subset(g, p.above[z]) && !subset(g, p.below[z])) extends = false;
        });
        if (extends && holds(h, c)) {
          ok = false;
          break;
        }
      }
    memo[key] = ok;
    return ok;
  };

  std::vector<Color> out;
  for (Color c = 0; c < enc.colors; ++c)
    if (holds(f, c)) out.push_back(c);
  return out;
}

std::optional<Color> s_color_of(const Poset& p, Mask f, const SEncoding& enc) {
  auto cs = s_colors_of(p, f, enc);
  if (cs.size() != 1) return std::nullopt;
  return cs[0];
}

bool s_coloring_well_formed(const Poset& p, const SEncoding& enc) {
  if (!completely_ms_colored(p, enc.ms)) return false;
  std::vector<Mask> nodes;
  if (p.n > 0 && p.par_components(p.all()).size() > 1) nodes.push_back(p.all());
  for (Mask g : ms_factors(p, p.all()))
    for (const auto& q : parallel_factors(p, g)) nodes.push_back(q.all);
  for (Mask q : nodes) {
    std::set<Color> seen;
    for (Mask comp : p.par_components(q)) seen.insert(*decode_ms(p, comp, enc.ms));
    if (seen.size() > 1) return false;
  }
  return true;
}

std::optional<std::string> pair_conflict(const Poset& p, Mask f, Color cf, Mask g, Color cg) {
  bool same = cf == cg;
  if (!(f & g)) {
    if (same && sequentially_adjacent(p, f, g)) return std::string("adjacent factors share a color");
    return std::nullopt;
  }
  Mask small = f, big = g;
  if (subset(g, f)) std::swap(small, big);
  if (!subset(small, big)) return std::string("factors overlap without inclusion");
  if (!same) return std::nullopt;
  bool separated = false;
  for_each_bit(big & ~small, [&](int x) {
    if (!((p.above[x] | p.below[x]) & small)) separated = true;
  });
  if (!separated) return std::string("nested factors share a color with no incomparable witness");
  return std::nullopt;
}

std::optional<std::pair<std::pair<Mask, Mask>, std::string>> incompatible_pair(const Poset& p,
                                                                              const SColoring& c) {
  auto seq = sequential_factors(p, p.all());
  for (const auto& [f, col] : c.color)
    if (!std::binary_search(seq.begin(), seq.end(), f))
      return std::make_pair(std::make_pair(f, f), std::string("colored mask is not a sequential factor"));
  for (auto a = c.color.begin(); a != c.color.end(); ++a)
    for (auto b = std::next(a); b != c.color.end(); ++b)
      if (auto why = pair_conflict(p, a->first, a->second, b->first, b->second))
        return std::make_pair(std::make_pair(a->first, b->first), *why);
  return std::nullopt;
}

SEncoding encode_s(const Poset& p, const SColoring& c) {
  if (c.colors > kMaxColors)
    throw Error("too many colors for the subset encoding: " + std::to_string(c.colors));
  if (auto bad = incompatible_pair(p, c)) throw IncompatibleColoring(bad->first.first, bad->first.second, bad->second);

  SEncoding enc;
  enc.colors = c.colors;
  enc.v.assign(c.colors, 0);
  std::map<Mask, Color> derived;
  for (Mask g : ms_factors(p, p.all())) derived[g] = 0;
  for (const auto& [f, col] : c.color) {
    for (Mask g : direct_ms_factors(p, f)) derived[g] |= 1 << col;
    for_each_bit(f, [&](int x) {
      if (subset(f & ~bit(x), p.above[x] | p.below[x])) enc.v[col] |= bit(x);
    });
  }
  enc.ms = encode_ms(p, derived, 1 << c.colors);
  return enc;
}

std::vector<SpecialEdge> special_edges(const DGraph& d) {
  std::set<SpecialEdge> s;
  for (const auto& [id, n] : d.nodes)
    for (const auto& e : n.out)
      if (e.special) s.insert({id, e.to});
  return {s.begin(), s.end()};
}

std::string edge_text(const SpecialEdge& e) {
  return "n" + std::to_string(e.from) + "->n" + std::to_string(e.to);
}

SColoring coloring_from_path(const SPTerm& t, const PathTree& path, const DGraph& d) {
  if (auto why = check_path(d, t, path)) throw InvalidPath(*why);
  Poset p = to_poset(t);
  auto edges = special_edges(d);
  SColoring out;
  out.colors = 2 * static_cast<int>(edges.size());
  for (const auto& e : edges)
    for (int b = 0; b < 2; ++b) out.names.push_back("(" + std::to_string(b) + "," + edge_text(e) + ")");

  std::map<int, std::vector<Mask>> by_edge;
  std::map<Mask, int> edge_of;
  for (const auto& m : marked_factors(path)) {
    auto it = std::find(edges.begin(), edges.end(), SpecialEdge{m.from, m.to});
    if (it == edges.end()) throw InvalidPath("marking edge is not a special edge of the graph");
    int k = static_cast<int>(it - edges.begin());
    auto [pos, fresh] = edge_of.emplace(m.elems, k);
    if (!fresh) {
      if (pos->second != k) throw InvalidPath("a factor is marked by two different edges");
      continue;
    }
    by_edge[k].push_back(m.elems);
  }

  // Two-colour the adjacency graph of each edge's factors.
  for (auto& [k, fs] : by_edge) {
    std::sort(fs.begin(), fs.end());
    std::map<Mask, int> side;
    for (Mask start : fs) {
      if (side.count(start)) continue;
      side[start] = 0;
      std::deque<Mask> todo{start};
      while (!todo.empty()) {
        Mask f = todo.front();
        todo.pop_front();
        for (Mask g : fs) {
          if (!sequentially_adjacent(p, f, g)) continue;
          auto it = side.find(g);
          if (it == side.end()) {
            side[g] = 1 - side[f];
            todo.push_back(g);
          } else if (it->second == side[f]) {
            throw InvalidPath("marked factors cannot alternate");
          }
        }
      }
    }
    for (Mask f : fs) out.color[f] = 2 * k + side[f];
  }
  return out;
}

nlohmann::json to_json(const MsEncoding& enc, const std::vector<std::string>& names) {
  nlohmann::json j = nlohmann::json::object();
  for (Color c = 0; c < enc.colors; ++c) {
    if (!enc.w[c] && !enc.s[c] && !enc.p[c]) continue;
    std::string key = c < static_cast<int>(names.size()) ? names[c] : "c" + std::to_string(c);
    j[key] = {{"w", elements(enc.w[c])}, {"s", elements(enc.s[c])}, {"p", elements(enc.p[c])}};
  }
  return j;
}

nlohmann::json to_json(const SEncoding& enc, const std::vector<std::string>& names) {
  nlohmann::json v = nlohmann::json::object();
  for (Color c = 0; c < enc.colors; ++c) {
    if (!enc.v[c]) continue;
    v[c < static_cast<int>(names.size()) ? names[c] : "c" + std::to_string(c)] = elements(enc.v[c]);
  }
  std::vector<std::string> subset_names;
  for (int m = 0; m < enc.ms.colors; ++m) subset_names.push_back(subset_name(m, names));
  return {{"v", v}, {"ms", to_json(enc.ms, subset_names)}};
}

nlohmann::json to_json(const SColoring& c, const Poset& p) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [f, col] : c.color)
    a.push_back({{"elements", elements(f)},
                 {"poset", p.term(f).text()},
                 {"color", col < static_cast<int>(c.names.size()) ? c.names[col] : "c" + std::to_string(col)}});
  return a;
}

}  // namespace spkit
