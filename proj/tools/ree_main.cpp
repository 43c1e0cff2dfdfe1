#include <iostream>
#include <string>
#include <vector>

#include "ree/cli.hpp"

int main(int argc, char** argv) {
  return ree::run_command(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
