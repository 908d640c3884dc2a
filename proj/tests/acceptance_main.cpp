// Acceptance suite runner: one line per criterion, nonzero exit on failure.

#include <filesystem>
#include <iostream>

#include "roughinc/acceptance.hpp"

int main(int argc, char** argv) {
  std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  auto report = roughinc::acceptance::run_suite(out, &std::cout);
  std::size_t passed = 0;
  for (const auto& r : report.results) passed += r.pass();
  std::cout << passed << "/" << report.results.size() << " criteria passed\n";
  return report.pass() ? 0 : 1;
}
