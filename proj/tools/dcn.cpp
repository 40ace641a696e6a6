#include <iostream>

#include "dcn/cli.hpp"

int main(int argc, char** argv) { return dcn::run_cli(argc, argv, std::cout, std::cerr); }
