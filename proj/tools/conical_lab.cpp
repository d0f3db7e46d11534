#include <iostream>

#include "conical/cli.hpp"

int main(int argc, char** argv) { return conical::cli::main_entry(argc, argv, std::cout, std::cerr); }
