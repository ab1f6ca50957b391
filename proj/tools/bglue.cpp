#include <iostream>

#include "bglue/cli/commands.hpp"

int main(int argc, char** argv) { return bglue::cli::run(argc, argv, std::cout, std::cerr); }
