#include <iostream>
#include <string>
#include <vector>

#include "wsds/cli_commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wsds::run_cli(args, std::cout, std::cerr);
}
