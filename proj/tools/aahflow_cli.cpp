#include <iostream>

#include "aahflow/cli/run.hpp"

int main(int argc, char** argv) { return aahflow::cli::main_entry(argc, argv, std::cout, std::cerr); }
