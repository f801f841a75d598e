#include "spkit/crosscheck.hpp"

#include <algorithm>
#include <exception>

#include "spkit/membership.hpp"
#include "spkit/pmso.hpp"
#include "spkit/rexpr.hpp"

namespace spkit {

const std::vector<std::string>& builtin_corpus() {
  static const std::vector<std::string> corpus = {
      "sub(x,a,istar(x,seq(a,par(x,x))))",
      "dia(sub(x,a,istar(x,seq(a,par(x,x)))),diamond(b))",
      "istar(x,seq(b,par(a,star(x))))",
      "star(seq(a,b))",
      "omega(or(par(a,b),eps))",
      "momega(a)",
      "ord(or(a,b))",
      "mord(par(a,b))",
      "diamond(b)",
      "dia(a,b)",
      "istar(x,par(a,star(x)))",
      "or(seq(a,b),par(a,star(b)))",
      "par(star(a),b)",
      "seq(star(a),b,star(a))",
      "sub(x,par(a,b),seq(x,x))",
      "istar(x,or(a,par(b,x)))",
      "or(eps,seq(a,a))",
      "star(or(a,par(b,b)))",
      "omega(star(a))",
      "istar(x,or(b,seq(a,par(x,x))))",
  };
  return corpus;
}

std::vector<std::string> read_corpus(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

namespace {

struct Prepared {
  const std::set<SPTerm>* members = nullptr;
  DGraph graph;
  FormulaP sentence;
};

nlohmann::json row_json(const CrosscheckReport& r, const CrosscheckRow& row) {
  nlohmann::json j;
  j["expression"] = r.corpus[row.expression];
  j["poset"] = row.poset;
  j["size"] = row.size;
  j["expr"] = row.by_expr;
  j["dgraph"] = row.by_dgraph;
  j["pmso"] = row.by_pmso ? nlohmann::json(*row.by_pmso) : nlohmann::json(nullptr);
  j["agree"] = row.agree();
  return j;
}

}  // namespace

CrosscheckReport crosscheck(const CrosscheckConfig& config) {
  if (config.max_size < 0) throw PreconditionViolated("crosscheck size bound must be non-negative");
  if (config.alphabet.empty()) throw PreconditionViolated("crosscheck alphabet is empty");

  CrosscheckReport report;
  report.corpus = config.corpus;
  report.max_size = config.max_size;
  report.pmso_max_size = std::min({config.pmso_max_size, config.max_size, max_model_size()});

  // Languages and graphs are built serially; only lookups happen in the loop.
  std::vector<ExprLanguage> langs;
  std::vector<Prepared> prepared(config.corpus.size());
  langs.reserve(config.corpus.size());
  for (std::size_t i = 0; i < config.corpus.size(); ++i) {
    ExprP e = parse_expr(config.corpus[i]);
    prepared[i].graph = build_rational(e);
    if (config.tamper) config.tamper(i, prepared[i].graph);
    prepared[i].sentence = emit_phi(prepared[i].graph, nullable(e));
    langs.emplace_back(e);
  }
  for (std::size_t i = 0; i < langs.size(); ++i) prepared[i].members = &langs[i].upto(config.max_size);

  auto posets = enumerate_posets(config.alphabet, config.max_size);
  const long long total = static_cast<long long>(config.corpus.size() * posets.size());
  report.rows.resize(static_cast<std::size_t>(total));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic, 4) if (config.parallel)
  for (long long k = 0; k < total; ++k) {
    std::size_t i = static_cast<std::size_t>(k) / posets.size();
    const SPTerm& p = posets[static_cast<std::size_t>(k) % posets.size()];
    CrosscheckRow& row = report.rows[static_cast<std::size_t>(k)];
    try {
      row.expression = i;
      row.poset = p.text();
      row.size = p.size();
      row.by_expr = prepared[i].members->count(p) > 0;
      row.by_dgraph = member_dgraph(prepared[i].graph, p);
      if (row.size <= report.pmso_max_size) row.by_pmso = model_check(prepared[i].sentence, p);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& row : report.rows) {
    if (row.by_pmso) ++report.pmso_checks;
    if (row.agree()) {
      ++report.agreements;
    } else if (!report.first_disagreement || row.size < report.first_disagreement->size) {
      report.first_disagreement = row;
    }
  }
  return report;
}

nlohmann::json CrosscheckReport::to_json(bool with_rows) const {
  nlohmann::json j;
  j["corpus"] = corpus;
  j["max_size"] = max_size;
  j["pmso_max_size"] = pmso_max_size;
  j["pairs"] = rows.size();
  j["agreements"] = agreements;
  j["pmso_checks"] = pmso_checks;
  j["agree"] = ok();
  j["first_disagreement"] = first_disagreement ? row_json(*this, *first_disagreement) : nlohmann::json(nullptr);

  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) per.push_back({{"expression", corpus[i]}, {"members", 0}, {"pairs", 0}, {"agreements", 0}});
  nlohmann::json disagreements = nlohmann::json::array();
  nlohmann::json all = nlohmann::json::array();
  for (const auto& row : rows) {
    auto& e = per[row.expression];
    e["pairs"] = e["pairs"].get<int>() + 1;
    e["members"] = e["members"].get<int>() + (row.by_expr ? 1 : 0);
    e["agreements"] = e["agreements"].get<int>() + (row.agree() ? 1 : 0);
    if (!row.agree()) disagreements.push_back(row_json(*this, row));
    if (with_rows) all.push_back(row_json(*this, row));
  }
  j["per_expression"] = per;
  j["disagreements"] = disagreements;
  if (with_rows) j["rows"] = all;
  return j;
}

}  // namespace spkit
