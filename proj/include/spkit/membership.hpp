#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spkit/dgraph.hpp"
#include "spkit/poset.hpp"
#include "spkit/rexpr.hpp"

namespace spkit {

// Language of an expression restricted to posets with at most `bound`
// elements, computed bottom-up. Results are cached per sub-expression, so one
// instance answers many membership queries cheaply.
class ExprLanguage {
 public:
  explicit ExprLanguage(ExprP e, std::size_t ceiling = 2'000'000);
  // Every member with at most max(bound, largest bound asked before) elements.
  const std::set<SPTerm>& upto(int bound);
  bool contains(const SPTerm& p);

 private:
  ExprP e_;
  std::size_t ceiling_;
  int bound_ = -1;
  std::set<SPTerm> lang_;
};

bool member_expr(const ExprP& e, const SPTerm& p);
// Paths assume Property PP: each parallel component goes to one child.
bool member_dgraph(const DGraph& d, const SPTerm& p);

struct PathTree {
  enum class Deco { Letter, Arity, Vector };
  int node = 0;
  Mask elems = 0;
  Deco deco = Deco::Letter;
  std::string letter;
  int arity = 0;
  Vec vector;
  std::vector<PathTree> kids;
  std::vector<int> via;          // out position (1-based) each kid was reached through
  std::vector<bool> special;     // whether that edge is special
};

struct MarkedFactor {
  Mask elems = 0;
  int from = 0;
  int to = 0;
  bool operator==(const MarkedFactor& o) const { return elems == o.elems && from == o.from && to == o.to; }
};

std::optional<PathTree> find_path(const DGraph& d, const SPTerm& p);
// Checks every local condition of a path tree against the graph and the poset.
// Returns the first violated condition, or nothing when the tree is a path.
std::optional<std::string> check_path(const DGraph& d, const SPTerm& p, const PathTree& t);
inline bool verify_path(const DGraph& d, const SPTerm& p, const PathTree& t) { return !check_path(d, p, t); }
// Every sub-path entered through a special edge, hereditary.
std::vector<MarkedFactor> marked_factors(const PathTree& t);

nlohmann::json to_json(const PathTree& t, const Poset& p);

std::set<SPTerm> enumerate_language(const ExprP& e, int n);
std::set<SPTerm> enumerate_language(const DGraph& d, int n);
std::vector<std::string> graph_letters(const DGraph& d);

}  // namespace spkit
