#include <iostream>

#include "ontorag/cli.h"

int main(int argc, char** argv) { return ontorag::run_cli(argc, argv, std::cout, std::cerr, std::cin); }
