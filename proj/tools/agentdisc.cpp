#include <iostream>

#include "agentdisc/cli.hpp"

int main(int argc, char** argv) { return agentdisc::run_cli(argc, argv, std::cout, std::cerr); }
