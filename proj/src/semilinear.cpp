#include "spkit/semilinear.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <cstdint>

namespace spkit {

namespace {

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

Vec add(Vec a, const Vec& b) {
  for (std::size_t d = 0; d < a.size(); ++d) a[d] += b[d];
  return a;
}

void check_dim(const Vec& v, int dim) {
  if (static_cast<int>(v.size()) != dim)
    throw DimensionMismatch("vector of length " + std::to_string(v.size()) + " in dimension " +
                            std::to_string(dim));
}

void check_index(int i, int dim) {
  if (i < 1 || i > dim)
    throw BadIndex("index " + std::to_string(i) + " outside [1.." + std::to_string(dim) + "]");
}

// w in P^* by dynamic programming over the box [0..w].
bool in_monoid(const std::vector<Vec>& periods, const Vec& w) {
  if (is_zero(w)) return true;
  if (periods.empty()) return false;
  std::size_t k = w.size();
  if (k == 1) {
    long long target = w[0];
    std::vector<char> r(target + 1, 0);
    r[0] = 1;
    for (long long x = 1; x <= target; ++x)
      for (const auto& p : periods)
        if (p[0] <= x && r[x - p[0]]) {
          r[x] = 1;
          break;
        }
    return r[target];
  }
  std::vector<std::size_t> stride(k);
  std::size_t total = 1;
  for (std::size_t d = k; d-- > 0;) {
    stride[d] = total;
    total *= static_cast<std::size_t>(w[d] + 1);
    if (total > 50'000'000) throw ResourceBound("membership box too large");
  }
  std::vector<std::size_t> off;
  std::vector<const Vec*> usable;
  for (const auto& p : periods) {
    bool fits = true;
    std::size_t o = 0;
    for (std::size_t d = 0; d < k; ++d) {
      if (p[d] > w[d]) fits = false;
      o += static_cast<std::size_t>(p[d]) * stride[d];
    }
    if (fits) {
      usable.push_back(&p);
      off.push_back(o);
    }
  }
  if (usable.empty()) return false;
  std::vector<char> r(total, 0);
  r[0] = 1;
  Vec x(k, 0);
  for (std::size_t idx = 1; idx < total; ++idx) {
    for (std::size_t d = k; d-- > 0;) {
      if (++x[d] <= w[d]) break;
      x[d] = 0;
    }
    for (std::size_t u = 0; u < usable.size(); ++u) {
      const Vec& p = *usable[u];
      bool le = true;
      for (std::size_t d = 0; d < k && le; ++d) le = p[d] <= x[d];
      if (le && r[idx - off[u]]) {
        r[idx] = 1;
        break;
      }
    }
  }
  return r[total - 1];
}

bool in_linear(const LinearSet& c, const Vec& v) {
  Vec w(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) {
    w[d] = v[d] - c.base[d];
    if (w[d] < 0) return false;
  }
  return in_monoid(c.periods, w);
}

// c is contained in b (sufficient test).
bool subsumed(const LinearSet& c, const LinearSet& b) {
  if (!in_linear(b, c.base)) return false;
  for (const auto& p : c.periods)
    if (!in_monoid(b.periods, p)) return false;
  return true;
}

void compositions(int m, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == parts - 1) {
    cur.push_back(m);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int x = 0; x <= m; ++x) {
    cur.push_back(x);
    compositions(m - x, parts, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> compositions(int m, int parts) {
  std::vector<std::vector<int>> out;
  if (parts == 0) {
    if (m == 0) out.push_back({});
    return out;
  }
  std::vector<int> cur;
  compositions(m, parts, cur, out);
  return out;
}

}  // namespace

SemiLinear SemiLinear::empty(int dim) {
  SemiLinear s;
  s.dim = dim;
  return s;
}

SemiLinear SemiLinear::point(Vec v) {
  SemiLinear s;
  s.dim = static_cast<int>(v.size());
  s.add({std::move(v), {}});
  return s;
}

SemiLinear SemiLinear::points(int dim, const std::vector<Vec>& vs) {
  SemiLinear s = empty(dim);
  for (const auto& v : vs) s.add({v, {}});
  return s;
}

SemiLinear SemiLinear::unit(int dim, int i) {
  check_index(i, dim);
  Vec v(dim, 0);
  v[i - 1] = 1;
  return point(std::move(v));
}

SemiLinear& SemiLinear::add(LinearSet c) {
  check_dim(c.base, dim);
  for (long long x : c.base)
    if (x < 0) throw Error("negative base entry");
  std::vector<Vec> ps;
  for (auto& p : c.periods) {
    check_dim(p, dim);
    for (long long x : p)
      if (x < 0) throw Error("negative period entry");
    if (!is_zero(p)) ps.push_back(std::move(p));
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  c.periods = std::move(ps);
  if (std::find(components.begin(), components.end(), c) == components.end())
    components.push_back(std::move(c));
  return *this;
}

bool member(const SemiLinear& s, const Vec& v) {
  check_dim(v, s.dim);
  for (long long x : v)
    if (x < 0) return false;
  for (const auto& c : s.components)
    if (in_linear(c, v)) return true;
  return false;
}

bool contains_zero(const SemiLinear& s) { return member(s, Vec(s.dim, 0)); }

SemiLinear simplify(const SemiLinear& s) {
  std::vector<LinearSet> comps;
  for (auto c : s.components) {
    // Drop periods generated by the remaining ones, largest first.
    std::sort(c.periods.begin(), c.periods.end(), [](const Vec& a, const Vec& b) {
      long long sa = 0, sb = 0;
      for (long long x : a) sa += x;
      for (long long x : b) sb += x;
      return sa != sb ? sa > sb : a > b;
    });
    for (std::size_t k = 0; k < c.periods.size();) {
      std::vector<Vec> others;
      for (std::size_t o = 0; o < c.periods.size(); ++o)
        if (o != k) others.push_back(c.periods[o]);
      if (in_monoid(others, c.periods[k]))
        c.periods.erase(c.periods.begin() + static_cast<long>(k));
      else
        ++k;
    }
    std::sort(c.periods.begin(), c.periods.end());
    comps.push_back(std::move(c));
  }
  std::sort(comps.begin(), comps.end(), [](const LinearSet& a, const LinearSet& b) {
    if (a.periods.size() != b.periods.size()) return a.periods.size() > b.periods.size();
    return std::tie(a.base, a.periods) < std::tie(b.base, b.periods);
  });
  comps.erase(std::unique(comps.begin(), comps.end()), comps.end());
  std::vector<LinearSet> kept;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    bool drop = false;
    for (std::size_t o = 0; o < comps.size() && !drop; ++o) {
      if (o == k) continue;
      // Among mutually subsuming components keep the earliest.
      if (subsumed(comps[k], comps[o]) && (o < k || !subsumed(comps[o], comps[k]))) drop = true;
    }
    if (!drop) kept.push_back(comps[k]);
  }
  std::sort(kept.begin(), kept.end(), [](const LinearSet& a, const LinearSet& b) {
    return std::tie(a.base, a.periods) < std::tie(b.base, b.periods);
  });
  SemiLinear out = SemiLinear::empty(s.dim);
  out.components = std::move(kept);
  return out;
}

SemiLinear set_union(const SemiLinear& a, const SemiLinear& b) {
  if (a.dim != b.dim) throw DimensionMismatch("union of different dimensions");
  SemiLinear out = a;
  for (const auto& c : b.components) out.add(c);
  return out;
}

SemiLinear pad(const SemiLinear& s, int at, int count) {
  if (at < 1 || at > s.dim + 1) throw BadIndex("pad position out of range");
  auto grow = [&](const Vec& v) {
    Vec r(v.begin(), v.begin() + (at - 1));
    r.insert(r.end(), count, 0);
    r.insert(r.end(), v.begin() + (at - 1), v.end());
    return r;
  };
  SemiLinear out = SemiLinear::empty(s.dim + count);
  for (const auto& c : s.components) {
    LinearSet n{grow(c.base), {}};
    for (const auto& p : c.periods) n.periods.push_back(grow(p));
    out.add(std::move(n));
  }
  return out;
}

SemiLinear reindex(const SemiLinear& s, const std::vector<int>& perm) {
  for (int p : perm) check_index(p, s.dim);
  auto pick = [&](const Vec& v) {
    Vec r;
    for (int p : perm) r.push_back(v[p - 1]);
    return r;
  };
  SemiLinear out = SemiLinear::empty(static_cast<int>(perm.size()));
  for (const auto& c : s.components) {
    LinearSet n{pick(c.base), {}};
    for (const auto& p : c.periods) n.periods.push_back(pick(p));
    out.add(std::move(n));
  }
  return out;
}

SemiLinear merge_coordinates(const SemiLinear& s, const std::vector<int>& coords) {
  std::set<int> merged(coords.begin(), coords.end());
  for (int c : merged) check_index(c, s.dim);
  auto map = [&](const Vec& v) {
    Vec r{0};
    for (int d = 1; d <= s.dim; ++d) {
      if (merged.count(d))
        r[0] += v[d - 1];
      else
        r.push_back(v[d - 1]);
    }
    return r;
  };
  SemiLinear out = SemiLinear::empty(s.dim - static_cast<int>(merged.size()) + 1);
  for (const auto& c : s.components) {
    LinearSet n{map(c.base), {}};
    for (const auto& p : c.periods) n.periods.push_back(map(p));
    out.add(std::move(n));
  }
  return out;
}

std::vector<Vec> box_points(int dim, int bound) {
  std::vector<Vec> out;
  Vec v(dim, 0);
  while (true) {
    out.push_back(v);
    int d = dim - 1;
    while (d >= 0 && v[d] == bound) v[d--] = 0;
    if (d < 0) break;
    ++v[d];
  }
  return out;
}

bool equal_on_box(const SemiLinear& a, const SemiLinear& b, int bound) {
  if (a.dim != b.dim) return false;
  for (const auto& v : box_points(a.dim, bound))
    if (member(a, v) != member(b, v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Substitution. Every draw from the inner set is b_t + (periods of t). A
// choice of how many draws use each component t gives a "variant" of an outer
// vector; inner periods of t become available once some draw uses t.

namespace {

struct Variant {
  Vec v;
  std::uint64_t used = 0;
};

SemiLinear substitute(const SemiLinear& inner, const SemiLinear& outer, int i, bool disjoint) {
  check_index(i, outer.dim);
  if (!disjoint && inner.dim != outer.dim)
    throw DimensionMismatch("same-dimension substitution needs equal dimensions");
  const int k = inner.dim, kp = outer.dim, i0 = i - 1;
  const int rdim = disjoint ? k + kp - 1 : k;
  const int T = static_cast<int>(inner.components.size());
  // Only components with periods need tracking: using them unlocks periods.
  std::vector<int> pbit(T, -1);
  int tracked = 0;
  for (int t = 0; t < T; ++t)
    if (!inner.components[t].periods.empty()) pbit[t] = tracked++;
  if (tracked > 64) throw ResourceBound("too many periodic inner components for substitution");

  auto embed_outer = [&](const Vec& v) {
    Vec r(rdim, 0);
    if (disjoint) {
      for (int j = 0; j < kp; ++j) {
        if (j < i0) r[j] = v[j];
        if (j > i0) r[j + k - 1] = v[j];
      }
    } else {
      r = v;
      r[i0] = 0;
    }
    return r;
  };
  auto embed_inner = [&](const Vec& u) {
    Vec r(rdim, 0);
    for (int d = 0; d < k; ++d) r[disjoint ? i0 + d : d] += u[d];
    return r;
  };
  std::vector<Vec> inner_emb;
  for (const auto& c : inner.components) inner_emb.push_back(embed_inner(c.base));
  // One variant per multiset of m inner components.
  auto variants = [&](long long m, const Vec& embedded) {
    std::vector<Variant> out;
    if (m > 64) throw ResourceBound("substitution count too large");
    std::function<void(int, long long, Variant&)> grow = [&](int from, long long left, Variant& cur) {
      if (left == 0) {
        out.push_back(cur);
        if (out.size() > 1'000'000) throw ResourceBound("too many substitution variants");
        return;
      }
      for (int t = from; t < T; ++t) {
        Variant next = cur;
        if (pbit[t] >= 0) next.used |= std::uint64_t{1} << pbit[t];
        for (int d = 0; d < rdim; ++d) next.v[d] += inner_emb[t][d];
        grow(t, left - 1, next);
      }
    };
    Variant start{embedded, 0};
    grow(0, m, start);
    return out;
  };

  // Components are collected in a set; SemiLinear::add is linear in the
  // number of components.
  std::set<std::pair<Vec, std::vector<Vec>>> found;
  for (const auto& oc : outer.components) {
    auto bases = variants(oc.base[i0], embed_outer(oc.base));
    std::vector<Variant> pvars;
    for (const auto& p : oc.periods)
      for (auto& v : variants(p[i0], embed_outer(p)))
        if (!is_zero(v.v)) pvars.push_back(std::move(v));
    for (const auto& beta : bases) {
      // U ranges over used(beta) joined with the used sets of some variants.
      std::set<std::uint64_t> reach{beta.used};
      std::vector<std::uint64_t> queue{beta.used};
      while (!queue.empty()) {
        std::uint64_t U = queue.back();
        queue.pop_back();
        for (const auto& pv : pvars) {
          std::uint64_t V = U | pv.used;
          if (reach.insert(V).second) queue.push_back(V);
        }
        if (reach.size() > 4096) throw ResourceBound("substitution has too many component choices");
      }
      for (std::uint64_t U : reach) {
        std::vector<const Variant*> avail;
        for (const auto& pv : pvars)
          if ((pv.used & ~U) == 0) avail.push_back(&pv);
        std::vector<Vec> periods;
        for (const auto* pv : avail) periods.push_back(pv->v);
        for (int t = 0; t < T; ++t)
          if (pbit[t] >= 0 && ((U >> pbit[t]) & 1))
            for (const auto& q : inner.components[t].periods) periods.push_back(embed_inner(q));
        std::sort(periods.begin(), periods.end());
        periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
        // Cover the components of U not used by beta with one variant each.
        std::function<void(std::uint64_t, Vec)> cover = [&](std::uint64_t covered, Vec base) {
          std::uint64_t missing = U & ~covered;
          if (!missing) {
            found.emplace(std::move(base), periods);
            if (found.size() > 2'000'000) throw ResourceBound("substitution result too large");
            return;
          }
          int t = __builtin_ctzll(missing);
          for (const auto* pv : avail)
            if ((pv->used >> t) & 1) cover(covered | pv->used, add(base, pv->v));
        };
        cover(beta.used, beta.v);
      }
    }
  }
  SemiLinear out = SemiLinear::empty(rdim);
  for (const auto& [b, ps] : found) out.components.push_back({b, ps});
  return simplify(out);
}

}  // namespace

SemiLinear subst_disjoint(const SemiLinear& inner, const SemiLinear& outer, int i) {
  return substitute(inner, outer, i, true);
}

SemiLinear subst_same(const SemiLinear& s, const SemiLinear& outer, int i) {
  return substitute(s, outer, i, false);
}

SemiLinear power_subst(const SemiLinear& s, int i, int j) {
  check_index(i, s.dim);
  if (contains_zero(s)) throw ZeroVectorPresent();
  SemiLinear acc = SemiLinear::unit(s.dim, i);
  for (int step = 0; step < j; ++step) {
    SemiLinear next = simplify(set_union(acc, subst_same(acc, s, i)));
    if (next == acc) break;
    acc = std::move(next);
  }
  return acc;
}

std::vector<Vec> power_points(const SemiLinear& s, int i, int j, int bound) {
  check_index(i, s.dim);
  if (contains_zero(s)) throw ZeroVectorPresent();
  const int k = s.dim, i0 = i - 1;
  std::size_t total = 1;
  std::vector<std::size_t> stride(k);
  for (int d = k; d-- > 0;) {
    stride[d] = total;
    total *= static_cast<std::size_t>(bound + 1);
  }
  auto idx_of = [&](const Vec& v) {
    std::size_t x = 0;
    for (int d = 0; d < k; ++d) x += static_cast<std::size_t>(v[d]) * stride[d];
    return x;
  };
  // Outer vectors: a draw is non-zero, so v_i never exceeds k * bound.
  std::vector<Vec> outer;
  {
    Vec v(k, 0);
    while (true) {
      if (member(s, v)) outer.push_back(v);
      int d = k - 1;
      while (d >= 0 && v[d] == (d == i0 ? static_cast<long long>(k) * bound : bound)) v[d--] = 0;
      if (d < 0) break;
      ++v[d];
    }
  }
  long long max_m = 0;
  for (const auto& v : outer) max_m = std::max(max_m, v[i0]);

  std::vector<char> acc(total, 0);
  Vec unit(k, 0);
  unit[i0] = 1;
  if (bound >= 1) acc[idx_of(unit)] = 1;
  auto pts = box_points(k, bound);
  for (int step = 0; step < j; ++step) {
    std::vector<Vec> draws;
    for (const auto& v : pts)
      if (acc[idx_of(v)]) draws.push_back(v);
    // sums[m] = sums of exactly m draws inside the box
    std::vector<std::vector<char>> sums(1, std::vector<char>(total, 0));
    sums[0][0] = 1;
    for (long long m = 1; m <= max_m; ++m) {
      std::vector<char> next(total, 0);
      bool any = false;
      for (const auto& v : pts) {
        if (!sums[m - 1][idx_of(v)]) continue;
        for (const auto& d : draws) {
          Vec w = v;
          bool in = true;
          for (int q = 0; q < k && in; ++q) in = (w[q] += d[q]) <= bound;
          if (in) next[idx_of(w)] = any = true;
        }
      }
      sums.push_back(std::move(next));
      if (!any) break;
    }
    std::vector<char> grown = acc;
    for (const auto& v : outer) {
      if (v[i0] >= static_cast<long long>(sums.size())) continue;
      Vec base = v;
      base[i0] = 0;
      if (!std::all_of(base.begin(), base.end(), [&](long long x) { return x <= bound; })) continue;
      for (const auto& w : pts) {
        if (!sums[v[i0]][idx_of(w)]) continue;
        Vec r = add(base, w);
        if (std::all_of(r.begin(), r.end(), [&](long long x) { return x <= bound; })) grown[idx_of(r)] = 1;
      }
    }
    if (grown == acc) break;
    acc = std::move(grown);
  }
  std::vector<Vec> out;
  for (const auto& v : pts)
    if (acc[idx_of(v)]) out.push_back(v);
  return out;
}

// Closed form: {1_i} u {1_i + sum_m (u_m - 1_i) >= 0 : m >= 1, u_m in s}.
// For each non-empty set T of components the draws generate, over Z in
// coordinate i, base 1_i + sum_{t in T}(b_t - 1_i) with periods b_t - 1_i and
// P_t. Coordinate i of a generator is >= -1, so intersecting with x_i >= 0
// has an explicit Hilbert basis.
SemiLinear star_subst(const SemiLinear& s, int i) {
  check_index(i, s.dim);
  if (contains_zero(s)) throw ZeroVectorPresent();
  const int k = s.dim, i0 = i - 1;
  const int T = static_cast<int>(s.components.size());
  if (T > 16) throw ResourceBound("too many components for star substitution");
  SemiLinear out = SemiLinear::unit(k, i);

  struct Gen {
    Vec v;
    long long a;
  };
  for (unsigned sel = 1; sel < (1u << T); ++sel) {
    Vec base0(k, 0);
    base0[i0] = 1;
    std::vector<Gen> gens;
    for (int t = 0; t < T; ++t) {
      if (!((sel >> t) & 1)) continue;
      Vec w = s.components[t].base;
      w[i0] -= 1;
      base0 = add(base0, w);
      if (!is_zero(w)) gens.push_back({w, w[i0]});
      for (const auto& q : s.components[t].periods) gens.push_back({q, q[i0]});
    }
    std::vector<Gen> neg, pos, zero;
    for (auto& g : gens) (g.a < 0 ? neg : g.a > 0 ? pos : zero).push_back(g);

    // Multisets of negatives of exact size j, as summed vectors.
    auto neg_sums = [&](long long j) {
      std::vector<Vec> res;
      if (j > 32) throw ResourceBound("star substitution threshold too large");
      for (const auto& comp : compositions(static_cast<int>(j), static_cast<int>(neg.size()))) {
        Vec v(k, 0);
        for (std::size_t q = 0; q < neg.size(); ++q)
          for (int r = 0; r < comp[q]; ++r) v = add(v, neg[q].v);
        res.push_back(std::move(v));
      }
      return res;
    };

    std::vector<Vec> basis;
    for (const auto& g : zero) basis.push_back(g.v);
    for (const auto& g : pos) {
      basis.push_back(g.v);
      if (neg.empty()) continue;
      for (long long j = 1; j <= g.a; ++j)
        for (const auto& ns : neg_sums(j)) basis.push_back(add(g.v, ns));
    }

    // Seeds: minimal multisets of positives reaching gamma (or nothing when
    // gamma <= 0), then up to `slack` negatives on top.
    long long gamma = -base0[i0];
    std::vector<std::pair<Vec, long long>> seeds;  // (vector, slack)
    if (gamma <= 0) {
      seeds.push_back({Vec(k, 0), -gamma});
    } else {
      std::vector<std::size_t> cur;
      std::function<void(std::size_t, long long, Vec)> grow = [&](std::size_t from, long long sum,
                                                                 Vec v) {
        for (std::size_t g = from; g < pos.size(); ++g) {
          long long ns = sum + pos[g].a;
          Vec nv = add(v, pos[g].v);
          if (ns >= gamma) {
            long long mn = pos[g].a;
            for (std::size_t c : cur) mn = std::min(mn, pos[c].a);
            if (ns - mn < gamma) seeds.push_back({nv, ns - gamma});
          } else {
            cur.push_back(g);
            grow(g, ns, nv);
            cur.pop_back();
          }
        }
      };
      grow(0, 0, Vec(k, 0));
    }
    for (const auto& [sv, slack] : seeds) {
      for (long long j = 0; j <= slack; ++j) {
        if (j > 0 && neg.empty()) break;
        for (const auto& ns : neg.empty() ? std::vector<Vec>{Vec(k, 0)} : neg_sums(j)) {
          Vec b = add(add(base0, sv), ns);
          bool ok = std::all_of(b.begin(), b.end(), [](long long x) { return x >= 0; });
          if (ok) out.add({b, basis});
        }
      }
    }
  }
  return simplify(out);
}

// ---------------------------------------------------------------------------

std::string vec_text(const Vec& v) {
  std::string s = "(";
  for (std::size_t d = 0; d < v.size(); ++d) {
    if (d) s += ',';
    s += std::to_string(v[d]);
  }
  return s + ")";
}

nlohmann::json to_json(const SemiLinear& s) {
  nlohmann::json j;
  j["dim"] = s.dim;
  j["components"] = nlohmann::json::array();
  for (const auto& c : s.components) {
    nlohmann::json cj;
    cj["base"] = c.base;
    cj["periods"] = nlohmann::json::array();
    for (const auto& p : c.periods) cj["periods"].push_back(p);
    j["components"].push_back(cj);
  }
  return j;
}

SemiLinear semilinear_from_json(const nlohmann::json& j) {
  SemiLinear s = SemiLinear::empty(j.at("dim").get<int>());
  for (const auto& cj : j.at("components")) {
    LinearSet c{cj.at("base").get<Vec>(), {}};
    if (cj.contains("periods"))
      for (const auto& p : cj.at("periods")) c.periods.push_back(p.get<Vec>());
    s.add(std::move(c));
  }
  return s;
}

std::string to_text(const SemiLinear& s) {
  std::string t = "sl<" + std::to_string(s.dim) + ">{";
  for (std::size_t c = 0; c < s.components.size(); ++c) {
    if (c) t += ", ";
    t += "lin(" + vec_text(s.components[c].base) + ";";
    for (std::size_t p = 0; p < s.components[c].periods.size(); ++p) {
      if (p) t += ',';
      t += vec_text(s.components[c].periods[p]);
    }
    t += ")";
  }
  return t + "}";
}

namespace {

struct LitParser {
  std::string_view s;
  std::size_t i = 0;
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool peek(char c) {
    skip();
    return i < s.size() && s[i] == c;
  }
  void expect(char c) {
    skip();
    if (i >= s.size() || s[i] != c) throw SyntaxError(std::string("expected '") + c + "'", i);
    ++i;
  }
  void word(std::string_view w) {
    skip();
    if (s.substr(i, w.size()) != w) throw SyntaxError("expected " + std::string(w), i);
    i += w.size();
  }
  long long num() {
    skip();
    std::size_t b = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (b == i) throw SyntaxError("expected number", b);
    return std::stoll(std::string(s.substr(b, i - b)));
  }
  Vec vec() {
    expect('(');
    Vec v;
    if (!peek(')')) {
      v.push_back(num());
      while (peek(',')) {
        expect(',');
        v.push_back(num());
      }
    }
    expect(')');
    return v;
  }
};

}  // namespace

SemiLinear parse_semilinear(std::string_view text) {
  LitParser p{text};
  p.word("sl");
  p.expect('<');
  int dim = static_cast<int>(p.num());
  p.expect('>');
  p.expect('{');
  SemiLinear s = SemiLinear::empty(dim);
  if (!p.peek('}')) {
    while (true) {
      p.word("lin");
      p.expect('(');
      LinearSet c{p.vec(), {}};
      p.expect(';');
      if (!p.peek(')')) {
        c.periods.push_back(p.vec());
        while (p.peek(',')) {
          p.expect(',');
          c.periods.push_back(p.vec());
        }
      }
      p.expect(')');
      try {
        s.add(std::move(c));
      } catch (const Error& e) {
        throw SyntaxError(e.what(), p.i);
      }
      if (!p.peek(',')) break;
      p.expect(',');
    }
  }
  p.expect('}');
  p.skip();
  if (p.i != text.size()) throw SyntaxError("trailing input", p.i);
  return s;
}

}  // namespace spkit
