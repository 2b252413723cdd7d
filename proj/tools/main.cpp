#include <iostream>

#include "tklab/cli.hpp"

int main(int argc, char** argv)
{
    return tklab::run_cli(argc, argv, std::cout, std::cerr);
}
