#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "plankforge/kernels.hpp"

int main(int argc, char** argv) {
  plankforge::configure_threads_from_env();
  const std::vector<std::string> args(argv + 1, argv + argc);
  return plankforge::cli::run(args, std::cout, std::cerr);
}
