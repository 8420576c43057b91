#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return carnot_hardy::cli::run(argc, argv, std::cout, std::cerr); }
