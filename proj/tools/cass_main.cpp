#include "cass/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cass::cli::run(argc, argv, std::cout, std::cerr); }
