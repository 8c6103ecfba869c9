#include <iostream>

#include "mlid/cli/app.hpp"

int main(int argc, char** argv) {
  return mlid::cli::run_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
