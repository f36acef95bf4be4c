#include <iostream>
#include <string>
#include <vector>

#include "wjn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wjn::cli::main(args, std::cout, std::cerr);
}
