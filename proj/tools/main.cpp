#include "evonet/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return evonet::cli::run_cli(argc, argv, std::cout, std::cerr);
}
