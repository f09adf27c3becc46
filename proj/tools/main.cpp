#include <iostream>
#include <string>
#include <vector>

#include "thermalent/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return thermalent::cli::run(args, std::cout, std::cerr);
}
