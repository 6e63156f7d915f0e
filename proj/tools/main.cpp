#include "qcube_cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qcube::cli::run(argc, argv, std::cout, std::cerr); }
