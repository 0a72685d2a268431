#include <iostream>

#include "hyperball/commands.hpp"

int main(int argc, char** argv) { return hyperball::cli::run(argc, argv, std::cout, std::cerr); }
