#include <cstdio>
#include <string>
#include <vector>

#include "chainfis/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    const chainfis::cli::CommandResult result = chainfis::cli::run_command(args);
    if (!result.summary.empty()) {
        std::FILE* stream = result.exit_code == 0 ? stdout : stderr;
        std::fprintf(stream, "%s\n", result.summary.c_str());
    }
    return result.exit_code;
}
