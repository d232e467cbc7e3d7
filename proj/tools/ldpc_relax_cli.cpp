#include <iostream>

#include "ldpc_relax/cli.hpp"

int main(int argc, char **argv) { return ldpc_relax::cli::run(argc, argv, std::cout, std::cerr); }
