#include <iostream>

#include "biruin/commands.hpp"

int main(int argc, char** argv) { return biruin::run_cli(argc, argv, std::cout, std::cerr); }
