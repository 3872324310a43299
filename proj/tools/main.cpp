#include <iostream>

#include "abpoint/cli.hpp"

int main(int argc, char** argv) { return abpoint::cli::run(argc, argv, std::cout, std::cerr); }
