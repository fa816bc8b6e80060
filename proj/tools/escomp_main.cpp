#include <iostream>

#include "escomp/cli.hpp"

int main(int argc, char** argv) {
    return escomp::cli_dispatch(argc, argv, std::cout, std::cerr);
}
