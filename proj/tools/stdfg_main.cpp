#include <iostream>
#include <string>
#include <vector>

#include "stdfg/cli.hpp"

int main(int argc, char** argv) {
  return stdfg::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
