#include "doubletscope/cli_io.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return doubletscope::run(argc, argv, std::cout, std::cerr);
}
