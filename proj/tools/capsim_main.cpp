#include <iostream>
#include <string>
#include <vector>

#include "capsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return capsim::cli_dispatch(args, std::cout, std::cerr);
}
