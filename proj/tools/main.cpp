#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return mapn::cli::runCli(args, std::cout, std::cerr);
}
