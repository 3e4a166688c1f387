#include <iostream>
#include <string>
#include <vector>

#include "concept_align/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return concept_align::cli::run(args, std::cout, std::cerr);
}
