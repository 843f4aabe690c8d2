#include "ringmod/cli_app.hpp"

#include <cstdio>

int main(int argc, char** argv) {
    const auto result = ringmod::cli::cli_run({argv + 1, argv + argc});
    if (!result.out.empty()) std::fputs(result.out.c_str(), stdout);
    if (!result.err.empty()) std::fputs(result.err.c_str(), stderr);
    return result.exit_code;
}
