#include <iostream>

#include "bellmom/cli.hpp"

int main(int argc, char** argv) { return bellmom::cli::run(argc, argv, std::cout, std::cerr); }
