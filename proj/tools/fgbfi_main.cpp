#include <iostream>
#include <string>
#include <vector>

#include "fgbfi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fgbfi::run_cli(args, std::cout, std::cerr);
}
