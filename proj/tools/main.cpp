#include <iostream>
#include <string>
#include <vector>

#include "quadest/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return quadest::cli::run(args, std::cout, std::cerr);
}
