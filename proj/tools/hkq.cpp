#include <iostream>
#include <string>
#include <vector>

#include "hkq_commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hkq::cli::run(args, std::cout, std::cerr);
}
