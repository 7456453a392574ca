#include "curvecast/cli.hpp"

int main(int argc, char** argv) {
  return curvecast::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
