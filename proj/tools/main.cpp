#include <string>
#include <vector>

#include "agtd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return agtd::dispatch(args);
}
