#include <string>
#include <vector>

#include "evoselect/cli.hpp"

int main(int argc, char** argv) {
    return evoselect::cli::run_main(std::vector<std::string>(argv, argv + argc));
}
