#include <iostream>

#include "fastcharge/cli.hpp"

int main(int argc, char** argv) { return fastcharge::cli_main(argc, argv, std::cout, std::cerr); }
