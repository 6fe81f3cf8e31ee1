#include <iostream>

#include "ircr/cli.hpp"

int main(int argc, char** argv) {
  return ircr::run_cli(argc, argv, std::cout, std::cerr);
}
