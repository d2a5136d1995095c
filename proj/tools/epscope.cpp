#include <cstdlib>
#include <iostream>

#include "epscope_cli.hpp"

int main(int argc, char** argv) {
    return epscope::cli::main_entry(argc, argv, std::cout, std::cerr, std::getenv("EPSCOPE_THREADS"));
}
