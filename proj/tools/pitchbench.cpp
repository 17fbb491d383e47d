#include <iostream>
#include <string>
#include <vector>

#include "pitchbench/cli.h"

int main(int argc, char** argv) {
  return pitchbench::cli::Run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
