#include "thermoflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return thermoflow::cli::run(argc, argv, std::cout, std::cerr); }
