#include <iostream>

#include "seclossy/cli.hpp"

int main(int argc, char** argv) { return seclossy::run_cli(argc, argv, std::cout, std::cerr); }
