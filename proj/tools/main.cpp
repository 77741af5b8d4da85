#include <string>
#include <vector>

#include "psl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psl::run_cli(args);
}
