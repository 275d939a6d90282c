#include <iostream>

#include "qcarpet/cli.hpp"

int main(int argc, char** argv) { return qcarpet::run_cli(argc, argv, std::cout, std::cerr); }
