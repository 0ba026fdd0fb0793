#include <iostream>
#include <string>
#include <vector>

#include "glfm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return glfm::cli::run(args, std::cout, std::cerr);
}
