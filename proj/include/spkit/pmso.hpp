#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spkit/coloring.hpp"
#include "spkit/dgraph.hpp"
#include "spkit/poset.hpp"
#include "spkit/semilinear.hpp"

namespace spkit {

struct Formula;
using FormulaP = std::shared_ptr<const Formula>;

// Variables whose name starts with an upper-case letter range over sets,
// the others over elements.
//
// Beyond plain MSO and Q, a few constructs are evaluated directly. Each is
// MSO-definable on finite posets:
//   seqsum(X,Y,Z)      X = Y + Z: a partition of X into non-empty Y < Z
//   iter(X,Y,m,e; f)   X is a product of at least two non-empty blocks Y each
//                      satisfying f. m = star, omega or momega; the last two
//                      also require the empty block to be allowed (e = 1).
//   dia(X,Y,g,h; f1; f2) alternation G1 H1 ... Gk, k >= 2, with at least two
//                      non-empty blocks; g and h say whether empty G or H
//                      blocks are allowed.
//   factor(F,R), seqfactor(F,R)   F is a (sequential) factor of R
//   col(F,S,b,nA->nB)  the colouring S gives F the colour (b, nA->nB)
//   scoloring(R,S)     S is a compatible colouring of the factors of R
//   existscol S [edges] (f)   there is a colouring over booleans x edges
struct Formula {
  enum class Kind {
    True, False, Letter, In, Less, Not, And, Or, Implies,
    ExistsFO, ForallFO, ExistsSO, ForallSO, Q,
    SeqSum, Iter, Dia, Factor, SeqFactor, Color, SColoring, Size, ExistsColoring
  };
  enum class Mode { Star, Omega, MOmega };

  Kind kind = Kind::True;
  std::string letter;
  std::vector<std::string> vars;
  std::vector<FormulaP> kids;
  SemiLinear set;   // Q, dimension = number of kids
  int number = 0;   // Size: the count; Color: the boolean
  Mode mode = Mode::Star;
  bool eps1 = false, eps2 = false;
  SpecialEdge edge;                // Color
  std::vector<SpecialEdge> edges;  // ExistsColoring

  bool operator==(const Formula& o) const;
};

namespace fm {
FormulaP truth(bool v);
FormulaP letter(std::string a, std::string x);
FormulaP in(std::string x, std::string X);
FormulaP less(std::string x, std::string y);
FormulaP not_(FormulaP f);
FormulaP and_(std::vector<FormulaP> fs);
FormulaP or_(std::vector<FormulaP> fs);
FormulaP implies(FormulaP a, FormulaP b);
FormulaP exists(std::string v, FormulaP body);
FormulaP forall(std::string v, FormulaP body);
FormulaP q(std::string z, std::vector<FormulaP> psis, SemiLinear s);
FormulaP seqsum(std::string x, std::string y, std::string z);
FormulaP iter(std::string x, std::string y, Formula::Mode m, bool eps, FormulaP f);
FormulaP dia(std::string x, std::string y, bool g_eps, bool h_eps, FormulaP g, FormulaP h);
FormulaP factor(std::string f, std::string r, bool sequential);
FormulaP color(std::string f, std::string s, int b, SpecialEdge e);
FormulaP scoloring(std::string r, std::string s);
FormulaP size(std::string x, int n);
FormulaP exists_coloring(std::string s, std::vector<SpecialEdge> edges, FormulaP body);
}  // namespace fm

std::string print_formula(const FormulaP& f);
// Q sets may be written as semilinear text (sl<2>{...}) or as constraints.
FormulaP parse_formula(std::string_view text);
nlohmann::json to_json(const FormulaP& f);
bool formula_equal(const FormulaP& a, const FormulaP& b);

struct ColoringValue {
  SColoring coloring;
  std::vector<SpecialEdge> edges;  // colour 2k+b is (b, edges[k])
};

struct Assignment {
  std::map<std::string, int> elems;
  std::map<std::string, Mask> sets;
  std::map<std::string, ColoringValue> colorings;
};

// Largest model size accepted: SPKIT_MAX_POSET_SIZE, default 8.
int max_model_size();

// Throws ResourceBound beyond max_model_size(), UnboundVariable on a free
// variable missing from asg.
bool model_check(const FormulaP& f, const SPTerm& p, const Assignment& asg = {});

// Formula with the single free set variable `var` true of exactly the
// subsets labelling a path from node n.
FormulaP emit_phi_node(const DGraph& d, int n, const std::string& var = "X");
FormulaP emit_phi(const DGraph& d, bool nullable);

}  // namespace spkit
