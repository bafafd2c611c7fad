#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  return granusense::cli::run_command(
      std::vector<std::string>(argv + 1, argv + argc));
}
