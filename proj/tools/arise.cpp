#include <iostream>

#include "arise/cli/cli.hpp"

int main(int argc, char** argv) {
  return arise::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
