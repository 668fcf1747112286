#include <iostream>

#include "semm/cli.hpp"

int main(int argc, char** argv) { return semm::cli::run(argc, argv, std::cout, std::cerr); }
