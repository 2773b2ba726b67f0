#include <iostream>

#include "oulab/cli.hpp"

int main(int argc, char** argv) { return oulab::run_cli(argc, argv, std::cout, std::cerr); }
