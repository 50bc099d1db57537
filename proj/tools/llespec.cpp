#include <iostream>
#include <string>
#include <vector>

#include "llespec/cli_harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return llespec::cli::run(args, std::cout, std::cerr);
}
