#include <iostream>

#include "ergo_cli/cli.hpp"

int main(int argc, char** argv) { return ergo::cli::run(argc, argv, std::cout, std::cerr); }
