#include <iostream>

#include "finsler/cli/run.hpp"

int main(int argc, char** argv) { return finsler::cli::run_cli(argc, argv, std::cout, std::cerr); }
