#include <iostream>

#include "anticipate/cli.hpp"

int main(int argc, char** argv) { return anticipate::cli::run(argc, argv, std::cout, std::cerr); }
