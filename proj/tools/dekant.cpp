#include <iostream>

#include "dekant/cli.hpp"

int main(int argc, char** argv) { return dekant::run_cli(argc, argv, std::cout, std::cerr); }
