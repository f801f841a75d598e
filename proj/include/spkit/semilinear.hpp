#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spkit/errors.hpp"

namespace spkit {

using Vec = std::vector<long long>;

struct LinearSet {
  Vec base;
  std::vector<Vec> periods;
  bool operator==(const LinearSet& o) const { return base == o.base && periods == o.periods; }
};

// Finite union of linear sets b + P^* in N^dim. Zero periods are dropped and
// periods are kept sorted and unique. Indices in the public operations are
// 1-based.
struct SemiLinear {
  int dim = 0;
  std::vector<LinearSet> components;

  static SemiLinear empty(int dim);
  static SemiLinear point(Vec v);
  static SemiLinear points(int dim, const std::vector<Vec>& vs);
  static SemiLinear unit(int dim, int i);  // {1_i}

  SemiLinear& add(LinearSet c);
  bool operator==(const SemiLinear& o) const { return dim == o.dim && components == o.components; }
};

bool member(const SemiLinear& s, const Vec& v);
bool contains_zero(const SemiLinear& s);
// Structural normal form: sorted components, redundant periods and subsumed
// components removed.
SemiLinear simplify(const SemiLinear& s);
SemiLinear set_union(const SemiLinear& a, const SemiLinear& b);
// Inserts `count` zero coordinates before 1-based position `at`.
SemiLinear pad(const SemiLinear& s, int at, int count = 1);
// Coordinate j of the result is coordinate perm[j] (1-based) of the input.
SemiLinear reindex(const SemiLinear& s, const std::vector<int>& perm);
// Replaces the listed coordinates (1-based) by one coordinate holding their
// sum, placed first.
SemiLinear merge_coordinates(const SemiLinear& s, const std::vector<int>& coords);
// Semantic equality checked on [0..bound]^dim.
bool equal_on_box(const SemiLinear& a, const SemiLinear& b, int bound);
std::vector<Vec> box_points(int dim, int bound);

// Each v' in outer has coordinate i replaced by a block of inner's dimension
// holding the sum of v'_i independent draws from inner.
SemiLinear subst_disjoint(const SemiLinear& inner, const SemiLinear& outer, int i);
// Same dimension: v''_i = sum of draws_i, v''_r = v'_r + sum of draws_r.
// Draws come from s, the outer vector from outer.
SemiLinear subst_same(const SemiLinear& s, const SemiLinear& outer, int i);
// Cumulative iterate: P_0 = {1_i}, P_{j+1} = P_j u subst_same(P_j, s, i).
SemiLinear power_subst(const SemiLinear& s, int i, int j);
// power_subst(s, i, j) restricted to [0..bound]^dim, computed pointwise.
// Exact: every point of the box only needs draws and outer vectors that are
// themselves bounded. Sorted.
std::vector<Vec> power_points(const SemiLinear& s, int i, int j, int bound);
// Union of all power_subst(s, i, j).
SemiLinear star_subst(const SemiLinear& s, int i);

// Quantifier-free linear arithmetic: + - integer multiples, = != < <= > >=,
// congruences "e = e mod m", and/or/not. Variables are x1..xdim or, when
// they are not all of that form, distinct names taken in alphabetical order.
SemiLinear from_constraints(std::string_view text, int dim, int box = 16);
// Truth of the constraint text at a point, for verification.
bool eval_constraints(std::string_view text, int dim, const Vec& v);

nlohmann::json to_json(const SemiLinear& s);
SemiLinear semilinear_from_json(const nlohmann::json& j);
// Literal form: sl{lin((1,0);(1,0),(1,1)), lin((0,2);)}
std::string to_text(const SemiLinear& s);
SemiLinear parse_semilinear(std::string_view text);
std::string vec_text(const Vec& v);

}  // namespace spkit
