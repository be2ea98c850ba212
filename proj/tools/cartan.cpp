#include <iostream>

#include "cartan/cli/commands.hpp"

int main(int argc, char** argv) { return cartan::cli::runCli(argc, argv, std::cout, std::cerr); }
