#include <iostream>

#include "freespectra/cli.hpp"

int main(int argc, char** argv) {
    return freespectra::cli::run(argc, argv, std::cout, std::cerr);
}
