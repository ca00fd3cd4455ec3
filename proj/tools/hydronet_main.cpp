#include <cstdio>
#include <string>
#include <vector>

#include "hydronet/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const hydronet::CommandResult result = hydronet::run(args);
    if (result.exit_code == 0) {
        for (const auto& path : result.artifacts) std::printf("wrote %s\n", path.c_str());
        std::printf("%s\n", result.summary.c_str());
    } else {
        std::fprintf(stderr, "%s\n", result.summary.c_str());
    }
    return result.exit_code;
}
