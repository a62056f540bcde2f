#include <iostream>
#include <string>
#include <vector>

#include "lsmc/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lsmc::app::run_cli(args, std::cout, std::cerr);
}
