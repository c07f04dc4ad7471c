#include <iostream>

#include "farmledger/cli.hpp"

int main(int argc, char** argv) { return farmledger::cli::run(argc, argv, std::cout, std::cerr); }
