#include <iostream>
#include <string>
#include <vector>

#include "todi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return todi::cli::dispatch(args, std::cout, std::cerr);
}
