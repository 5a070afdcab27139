#include <iostream>

#include "aspir/cli.hpp"

int main(int argc, char** argv) { return aspir::run_cli(argc, argv, std::cout, std::cerr); }
