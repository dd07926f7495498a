#include <iostream>

#include "stil/cli.hpp"

int main(int argc, char** argv) { return stil::cli::run(argc, argv, std::cout, std::cerr); }
