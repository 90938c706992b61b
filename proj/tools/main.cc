#include <iostream>
#include <string>
#include <vector>

#include "pmfrank/cli/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pmfrank::cli::run(args, std::cout, std::cerr);
}
