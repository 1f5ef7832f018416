#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  curvkit::cli::Hooks hooks;
  hooks.extra_properties = curvkit::oracle::property_checks();
  return curvkit::cli::run(args, std::cout, std::cerr, hooks);
}
