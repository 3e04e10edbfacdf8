#include <string>
#include <vector>

#include "clustag/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return clustag::run_cli(args);
}
