#include <iostream>

#include "rca/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rca::cli::run(args, std::cin, std::cout, std::cerr);
}
