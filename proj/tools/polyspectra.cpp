#include <iostream>
#include <string>
#include <vector>

#include "polyspectra/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return polyspectra::run_cli(args, std::cout, std::cerr);
}
