#include <iostream>
#include <string>
#include <vector>

#include "automlp/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return automlp::cli::main_entry(args, std::cout, std::cerr);
}
