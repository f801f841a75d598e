#pragma once

#include <ostream>

namespace spkit::cli {

// Exit codes.
constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kBadInput = 2;
constexpr int kInvariant = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spkit::cli
