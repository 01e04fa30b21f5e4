#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return radial::cli::run(argc, argv, std::cout, std::cerr); }
