#include <string>
#include <vector>

#include "torusreg/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return torusreg::app::run(args);
}
