#include "mbn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mbn::cli::run(argc, argv, std::cout, std::cerr); }
