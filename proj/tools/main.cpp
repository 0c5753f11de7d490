#include <string>
#include <vector>

#include "hjt/shell.hpp"

int main(int argc, char** argv) {
  return hjt::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
