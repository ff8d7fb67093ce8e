#include <iostream>

#include "ncmetric/cli.hpp"

int main(int argc, char** argv) { return ncm::cli::run(argc, argv, std::cout, std::cerr); }
