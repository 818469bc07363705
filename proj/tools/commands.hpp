#pragma once

#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace rawkit::cli {

// Registers every subcommand (with its callback) on the app.
void register_commands(CLI::App& app);

// Pre-pass for `--config FILE`: loads the flat JSON object of defaults and
// splices them as `--key=value` tokens right after the subcommand, so flags
// given on the command line override the file (options take the last value).
// The --config tokens themselves are removed.
std::vector<std::string> expand_config(std::vector<std::string> args);

}  // namespace rawkit::cli
