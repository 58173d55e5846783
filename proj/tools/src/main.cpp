#include <iostream>
#include <string>
#include <vector>

#include "rapido/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rapido::run_cli(args, std::cout, std::cerr);
}
