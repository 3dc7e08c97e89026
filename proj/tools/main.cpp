#include <iostream>
#include <string>
#include <vector>

#include "triadyn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return triadyn::run_cli(args, std::cout, std::cerr);
}
