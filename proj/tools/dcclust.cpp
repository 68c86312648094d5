#include "dcclust/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dcclust::run_cli(argc, argv, std::cout, std::cerr); }
