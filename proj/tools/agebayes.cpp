#include <iostream>

#include "agebayes/cli.hpp"

int main(int argc, char** argv) { return agebayes::run_cli(argc, argv, std::cout, std::cerr); }
