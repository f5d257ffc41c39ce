#include <iostream>

#include "cifv/cli.hpp"

int main(int argc, char** argv) { return cifv::cli::main_entry(argc, argv, std::cout, std::cerr); }
