#include <iostream>

#include "pneu/cli.hpp"

int main(int argc, char** argv) { return pneu::run_cli(argc, argv, std::cout, std::cerr); }
