#include <iostream>

#include "o2hlab/cli.hpp"

int main(int argc, char** argv) {
    return o2hlab::cli_main(argc, argv, std::cout, std::cerr);
}
