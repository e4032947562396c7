#include <iostream>

#include "stieltjes/cli.hpp"

int main(int argc, char** argv) { return stieltjes::run_cli(argc, argv, std::cout, std::cerr); }
