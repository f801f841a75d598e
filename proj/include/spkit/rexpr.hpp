#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spkit/errors.hpp"

namespace spkit {

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

// One AST for rational expressions and their >1 forms. The *1 kinds only
// appear in >1 expressions; the plain sequential kinds only in rational ones.
struct Expr {
  enum class Kind {
    Empty, Eps, Letter, Or, Par, Seq, Star, Omega, MOmega, Ord, MOrd, Dia, Diamond, Sub, IStar,
    Seq1, Star1, Dia1, Omega1, MOmega1, Ord1, MOrd1
  };
  Kind kind = Kind::Empty;
  std::string letter;  // Letter, and the bound letter of Sub/IStar
  // Sub: {inner, outer} where inner replaces the bound letter inside outer.
  std::vector<ExprP> kids;
};

namespace ex {
ExprP empty();
ExprP eps();
ExprP letter(std::string a);
ExprP make(Expr::Kind k, std::vector<ExprP> kids, std::string letter = {});
ExprP or_(std::vector<ExprP> kids);
ExprP par(std::vector<ExprP> kids);
ExprP seq(std::vector<ExprP> kids);
ExprP sub(std::string x, ExprP inner, ExprP outer);
ExprP istar(std::string x, ExprP body);
}  // namespace ex

ExprP parse_expr(std::string_view text);
std::string to_text(const ExprP& e);
const char* kind_name(Expr::Kind k);

bool is_gt1_kind(Expr::Kind k);
bool is_plain_sequential(Expr::Kind k);
// True when no plain sequential operator (seq, star, dia, ...) occurs.
bool is_gt1(const ExprP& e);

bool nullable(const ExprP& e);
// Letters occurring as leaves, binders included.
std::set<std::string> letters(const ExprP& e);
std::set<std::string> binders(const ExprP& e);

// Side conditions on substitution and iterated substitution. Empty when e is
// a rational expression.
std::vector<std::string> validate(const ExprP& e);

inline constexpr const char* kEpsInSub = "ε ∈ L in L ∘ξ L'";
inline constexpr const char* kEpsInIStar = "ε ∈ L in L*ξ";
inline constexpr const char* kXiComparable = "ξ comparable in *ξ operand";

// Rewrites every sequential operator into its >1 form plus the guarded
// unions. With check, throws ValidationFailed when validate reports anything.
ExprP to_gt1(const ExprP& e, bool check = true);

}  // namespace spkit
