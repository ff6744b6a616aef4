#include <iostream>

#include "polyglot/cli.hpp"

int main(int argc, char** argv) { return polyglot::cli::run(argc, argv, std::cout, std::cerr); }
