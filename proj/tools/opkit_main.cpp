#include <iostream>
#include <string>
#include <vector>

#include "opkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return opkit::cli::run(args, std::cout, std::cerr);
}
