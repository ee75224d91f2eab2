#include <iostream>

#include "kolmolab/cli.hpp"

int main(int argc, char** argv) { return kolmolab::dispatch(argc, argv, std::cout, std::cerr); }
