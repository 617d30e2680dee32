#include "commands.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv, argv + argc);
    return ssvep::app::run_cli(args, std::cout, std::cerr);
}
