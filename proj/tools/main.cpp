#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return rsinsure::cli::run(argc, argv, std::cout, std::cerr); }
