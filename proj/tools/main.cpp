#include "smoothridge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return smoothridge::run_cli(argc, argv, std::cout, std::cerr); }
