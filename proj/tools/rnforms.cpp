#include <iostream>
#include <string>
#include <vector>

#include "rnforms/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rnforms::cli::dispatch(args, std::cout, std::cerr);
}
