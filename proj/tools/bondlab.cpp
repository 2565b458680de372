#include <iostream>

#include "bondlab/cli.hpp"

int main(int argc, char** argv) { return bondlab::cli::run(argc, argv, std::cout, std::cerr); }
