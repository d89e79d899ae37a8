#include <string>
#include <vector>

#include "latentgeo/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return latentgeo::cli_dispatch(args);
}
