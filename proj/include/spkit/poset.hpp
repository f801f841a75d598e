#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spkit/errors.hpp"

namespace spkit {

using Mask = std::uint64_t;
constexpr int kMaxElements = 64;

inline int popcount(Mask m) { return __builtin_popcountll(m); }
inline Mask bit(int i) { return Mask{1} << i; }
inline int lowest(Mask m) { return __builtin_ctzll(m); }

template <class F>
void for_each_bit(Mask m, F&& f) {
  while (m) {
    int i = lowest(m);
    m &= m - 1;
    f(i);
  }
}

// Canonical series-parallel term. Seq/Par are flattened, Par children are
// sorted by their text, and Empty only ever appears as the whole term.
struct SPTerm {
  enum class Kind { Empty, Letter, Seq, Par };
  Kind kind = Kind::Empty;
  std::string letter;
  std::vector<SPTerm> kids;
  mutable std::string cache;  // text, filled lazily

  static SPTerm eps() { return {}; }
  static SPTerm atom(std::string a);
  static SPTerm seq(std::vector<SPTerm> parts);
  static SPTerm par(std::vector<SPTerm> parts);

  bool empty() const { return kind == Kind::Empty; }
  int size() const;
  std::string text() const;

  bool operator==(const SPTerm& o) const { return text() == o.text(); }
  bool operator<(const SPTerm& o) const;
};

SPTerm canonicalize(const SPTerm& t);
SPTerm parse_term(std::string_view s);

SPTerm seq_product(const SPTerm& a, const SPTerm& b);
SPTerm par_product(const SPTerm& a, const SPTerm& b);
// Replaces every leaf labelled `letter` by `by`.
SPTerm substitute_letter(const SPTerm& t, const std::string& letter, const SPTerm& by);

std::vector<SPTerm> seq_factorize(const SPTerm& t);
std::vector<SPTerm> par_factorize(const SPTerm& t);

// Element-level view. Elements are numbered in left-to-right preorder of the
// canonical term, so element i is the i-th leaf.
struct Poset {
  int n = 0;
  std::vector<std::string> label;
  std::vector<Mask> above;  // above[i] = {j : i < j}
  std::vector<Mask> below;

  Mask all() const { return n == 64 ? ~Mask{0} : (bit(n) - 1); }
  bool less(int i, int j) const { return (above[i] >> j) & 1; }
  bool comparable(int i, int j) const { return ((above[i] | below[i]) >> j) & 1; }

  std::vector<Mask> par_components(Mask m) const;
  // Irreducible series factors of m, bottom first. A parallel mask is its own
  // single factor.
  std::vector<Mask> seq_factors(Mask m) const;
  bool is_sequential(Mask m) const;
  SPTerm term(Mask m) const;
  SPTerm term() const { return term(all()); }
  // Good interval of the sub-poset `within` (convex, and every outside element
  // relates uniformly to the interval).
  bool is_factor(Mask within, Mask f) const;
  int find_label(const std::string& a) const;
  Mask mask_of(const std::vector<std::string>& labels) const;
};

Poset to_poset(const SPTerm& t);

struct PosetRelation {
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::string, std::string> labels;
};

PosetRelation relation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PosetRelation& r);
PosetRelation to_relation(const SPTerm& t);
// Throws InvalidRelation on a non-strict or non-transitive order.
void validate_relation(const PosetRelation& r);

struct Decomposition {
  SPTerm term;
  std::vector<std::string> ids;  // ids[k] = relation id of term element k
};

Decomposition sp_decompose_ids(const PosetRelation& r);
SPTerm sp_decompose(const PosetRelation& r);

struct FactorReport {
  std::vector<Mask> sequential_factors;
  std::vector<Mask> ms_factors;
  std::vector<Mask> direct_ms_factors;
};

FactorReport factors(const SPTerm& t);

std::vector<Mask> sequential_factors(const Poset& p, Mask within);
std::vector<Mask> ms_factors(const Poset& p, Mask within);
std::vector<Mask> direct_ms_factors(const Poset& p, Mask within);
std::vector<Mask> all_factors(const Poset& p, Mask within);
// f is a factor of `within` and no sequential product F'+f+F'' in `within` is a factor.
bool is_sequentially_maximal(const Poset& p, Mask within, Mask f);

// Every poset with at most n elements over the alphabet, eps first, then by
// size and text.
std::vector<SPTerm> enumerate_posets(const std::vector<std::string>& alphabet, int n,
                                     std::size_t ceiling = 5'000'000);

}  // namespace spkit
