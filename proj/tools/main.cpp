#include <iostream>

#include "vaxgame/cli_io.hpp"

int main(int argc, char** argv) { return vaxgame::cli_main(argc, argv, std::cout, std::cerr); }
