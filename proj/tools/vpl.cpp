#include <iostream>
#include <string>
#include <vector>

#include "vpl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return vpl::run_command(args, std::cout, std::cerr);
}
