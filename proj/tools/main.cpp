#include <exception>
#include <iostream>

#include "basins/run_config.hpp"

int main(int argc, char** argv) {
  try {
    const basins::RunConfig cfg =
        basins::parse_config(std::vector<std::string>(argv + 1, argv + argc));
    return basins::run_cli(cfg, std::cout);
  } catch (const basins::HelpRequested& h) {
    std::cout << h.text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
