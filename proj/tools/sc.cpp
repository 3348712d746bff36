#include <iostream>

#include "smoothchol/cli.hpp"

int main(int argc, char** argv) { return smoothchol::run(argc, argv, std::cout, std::cerr); }
