#include <iostream>
#include <vector>

#include "waterfill/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return waterfill::run_cli(args, std::cout, std::cerr);
}
