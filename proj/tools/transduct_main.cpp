#include <iostream>
#include <string>
#include <vector>

#include "transduct/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return transduct::run_command(args, std::cout, std::cerr);
}
