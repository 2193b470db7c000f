#include <iostream>
#include <string>
#include <vector>

#include "mlbisim/cli/commands.h"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mlbisim::cli::run(args, std::cout, std::cerr);
}
