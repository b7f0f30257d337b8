#include <iostream>

#include "ctxf/cli.hpp"

int main(int argc, char** argv) { return ctxf::cli::run(argc, argv, std::cout, std::cerr); }
