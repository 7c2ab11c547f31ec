#include <vector>

#include "leccr/cli.hpp"

int main(int argc, char** argv) {
  return leccr::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
