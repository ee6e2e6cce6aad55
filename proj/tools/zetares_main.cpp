#include <iostream>
#include <string>
#include <vector>

#include "zetares/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto parsed = zetares::cli::parse_args(args, std::cerr);
  if (parsed.exit_code >= 0) return parsed.exit_code;
  return zetares::cli::run(parsed.config, std::cerr);
}
