#include "tdl/commands.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return tdl::cli::run_main(args, std::cout, std::cerr);
}
