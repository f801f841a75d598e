#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyPoset : Error {
  EmptyPoset() : Error("empty poset has no factorization") {}
};

struct InvalidRelation : Error {
  using Error::Error;
};

// Carries the four ids of an induced N: a<b, c<b, c<d, and nothing else.
struct NotSeriesParallel : Error {
  std::vector<std::string> witness;
  explicit NotSeriesParallel(std::vector<std::string> w)
      : Error("not series-parallel: N on " + join(w)), witness(std::move(w)) {}

 private:
  static std::string join(const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) s += (s.empty() ? "" : ",") + x;
    return s;
  }
};

struct ResourceBound : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct BadIndex : Error {
  using Error::Error;
};
struct ZeroVectorPresent : Error {
  ZeroVectorPresent() : Error("set contains the zero vector") {}
};
struct UnsupportedFormula : Error {
  using Error::Error;
};
struct VerificationFailed : Error {
  using Error::Error;
};

struct SyntaxError : Error {
  std::size_t pos;
  SyntaxError(const std::string& msg, std::size_t p)
      : Error(msg + " at position " + std::to_string(p)), pos(p) {}
};

struct ValidationFailed : Error {
  std::vector<std::string> violations;
  explicit ValidationFailed(std::vector<std::string> v)
      : Error("validation failed: " + (v.empty() ? std::string("?") : v.front())),
        violations(std::move(v)) {}
};

struct PreconditionViolated : Error {
  using Error::Error;
};
struct NotMsFactor : Error {
  using Error::Error;
};
struct NotSequentialFactor : Error {
  using Error::Error;
};
struct InvalidPath : Error {
  using Error::Error;
};
struct UnboundVariable : Error {
  using Error::Error;
};

}  // namespace spkit
