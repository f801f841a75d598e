#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spkit/dgraph.hpp"

namespace spkit {

struct CrosscheckConfig {
  std::vector<std::string> corpus;
  std::vector<std::string> alphabet{"a", "b"};
  int max_size = 5;
  // Posets above this size skip the model-checking leg (also capped by
  // max_model_size()).
  int pmso_max_size = 5;
  bool parallel = true;
  // Applied to each built graph before checking; lets tests corrupt one.
  std::function<void(std::size_t index, DGraph& d)> tamper;
};

struct CrosscheckRow {
  std::size_t expression = 0;  // corpus index
  std::string poset;
  int size = 0;
  bool by_expr = false;
  bool by_dgraph = false;
  std::optional<bool> by_pmso;
  bool agree() const { return by_expr == by_dgraph && (!by_pmso || *by_pmso == by_expr); }
};

struct CrosscheckReport {
  std::vector<std::string> corpus;
  int max_size = 0;
  int pmso_max_size = 0;
  std::vector<CrosscheckRow> rows;  // corpus order, then enumeration order
  std::size_t agreements = 0;
  std::size_t pmso_checks = 0;
  // Smallest poset on which the deciders disagree, earliest expression first.
  std::optional<CrosscheckRow> first_disagreement;

  bool ok() const { return !first_disagreement; }
  nlohmann::json to_json(bool with_rows = false) const;
};

// Member verdicts from the expression, the D-graph and the emitted sentence
// over every poset up to config.max_size. Pairs are spread over OpenMP
// threads unless config.parallel is off; the report does not depend on it.
CrosscheckReport crosscheck(const CrosscheckConfig& config);

// Twenty expressions over {a, b} exercising every operator.
const std::vector<std::string>& builtin_corpus();
// One expression per line; blank lines and text after '#' are ignored.
std::vector<std::string> read_corpus(std::istream& in);

}  // namespace spkit
