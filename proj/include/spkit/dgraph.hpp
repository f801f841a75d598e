#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spkit/rexpr.hpp"
#include "spkit/semilinear.hpp"

namespace spkit {

enum class Op { Seq1, Star1, Dia1, Omega1, MOmega1, Ord1, MOrd1 };

const char* op_name(Op op);
int op_arity(Op op);

struct NodeLabel {
  enum class Kind { Letter, Pres, Op };
  Kind kind = Kind::Letter;
  std::string letter;
  SemiLinear set;
  spkit::Op op = spkit::Op::Seq1;

  static NodeLabel of_letter(std::string a);
  static NodeLabel of_set(SemiLinear s);
  static NodeLabel of_op(spkit::Op o);
  bool is_pres() const { return kind == Kind::Pres; }
  bool is_letter(const std::string& a) const { return kind == Kind::Letter && letter == a; }
  bool operator==(const NodeLabel& o) const;
};

struct OutEdge {
  int to = 0;
  bool special = false;
  bool operator==(const OutEdge& o) const { return to == o.to && special == o.special; }
};

struct DNode {
  NodeLabel label;
  std::vector<OutEdge> out;  // position k in the sequence is coordinate k+1 of a set label
  bool operator==(const DNode& o) const { return label == o.label && out == o.out; }
};

struct DGraph {
  int root = 0;
  std::map<int, DNode> nodes;

  const DNode& at(int id) const;
  DNode& at(int id);
  bool operator==(const DGraph& o) const { return root == o.root && nodes == o.nodes; }
};

struct PropertyReport {
  bool pp = false;
  bool ss = false;
  bool dag = false;
  bool xi_normalized = false;
  bool arity = false;
  bool all() const { return pp && ss && dag && xi_normalized && arity; }
};

// Renumbers nodes 1..N in preorder over normal edges from the root and drops
// nodes that are not reachable.
DGraph renumber(const DGraph& d);
DGraph collect_garbage(const DGraph& d);

DGraph xi_normalize(const DGraph& d, const std::string& xi);
DGraph pp_suppress(const DGraph& d);
// Builds the graph of a >1 expression. Throws ValidationFailed on plain
// sequential operators.
DGraph build(const ExprP& gt1);
// to_gt1 followed by build.
DGraph build_rational(const ExprP& e, bool check = true);

PropertyReport check_properties(const DGraph& d, const std::set<std::string>& binders);
// Whether some member has the form P1 xi P2.
bool xi_series_check(const DGraph& d, const std::string& xi);
// The root accepts the empty poset.
bool root_accepts_empty(const DGraph& d);
// Whether every path from the root that ends with a special edge crosses a set
// node at a position whose unit vector the set lacks.
bool special_edges_gated(const DGraph& d);

std::string to_dot(const DGraph& d);
nlohmann::json to_json(const DGraph& d);
DGraph dgraph_from_json(const nlohmann::json& j);
std::string label_text(const NodeLabel& l);

}  // namespace spkit
