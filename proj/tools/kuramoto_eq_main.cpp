#include <string>
#include <vector>

#include "kuramoto/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kuramoto::cli::run(args);
}
