#include <iostream>
#include <string>
#include <vector>

#include "microfatigue/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return microfatigue::cli_dispatch(args, std::cout, std::cerr);
}
