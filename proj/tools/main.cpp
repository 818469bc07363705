#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "rawkit/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"RAW detection dataset toolkit: synthesis, development, "
               "splitting, slicing, statistics and evaluation"};
  app.set_version_flag("--version", std::string("rawkit ") + rawkit::kVersion +
                                        " (rng=" + rawkit::kRngAlgorithm + ")");
  app.require_subcommand(1);
  rawkit::cli::register_commands(app);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = rawkit::cli::expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
