#include <iostream>

#include "algebroid_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return algebroid::cli::run(args, std::cout, std::cerr);
}
