#include <iostream>

#include "spkit/cli.hpp"

int main(int argc, char** argv) { return spkit::cli::run(argc, argv, std::cout, std::cerr); }
