#pragma once

#include <iosfwd>

namespace sealnet {

    // exit codes of the command-line front end
    enum cli_exit : int { exit_ok = 0, exit_assertion = 1, exit_config = 2, exit_internal = 3 };

    // Parses argv and dispatches to simulate / analytics / emit-curves.
    // SEALNET_OUT_DIR supplies the default output directory.
    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
}
