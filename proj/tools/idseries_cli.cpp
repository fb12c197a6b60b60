#include <iostream>

#include "idseries/cli.hpp"

int main(int argc, char** argv) { return idseries::run_cli(argc, argv, std::cout, std::cerr); }
