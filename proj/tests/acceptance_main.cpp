#include <iostream>

#include "agdmm/acceptance.hpp"

int main() {
  int failed = 0;
  for (const auto& r : agdmm::run_acceptance()) {
    std::cout << agdmm::format_line(r) << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
