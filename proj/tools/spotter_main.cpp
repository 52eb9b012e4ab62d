#include <iostream>

#include "spotter/cli.hpp"

int main(int argc, char** argv) { return spotter::cli::run(argc, argv, std::cout, std::cerr); }
