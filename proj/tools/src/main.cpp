#include <iostream>

#include "qdr/cli.hpp"

int main(int argc, char** argv) { return qdr::cli::run_command(argc, argv, std::cout, std::cerr); }
