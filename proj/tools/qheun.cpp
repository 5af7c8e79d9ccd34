#include <iostream>

#include "qheun/cli.hpp"

int main(int argc, char** argv) { return qheun::cli::main_entry(argc, argv, std::cin, std::cout, std::cerr); }
