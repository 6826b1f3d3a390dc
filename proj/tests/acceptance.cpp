// Runs acceptance criteria 1 to 9 and prints one PASS/FAIL line per criterion.
// Progress messages go to stderr. Exit status is 1 if any criterion fails.
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "opb/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
  if (ids.empty()) {
    ids.resize(opb::Acceptance::kCriteria);
    std::iota(ids.begin(), ids.end(), 1);
  }
  opb::Acceptance acceptance([](const std::string& msg) { std::cerr << msg << std::endl; });
  int failed = 0;
  for (int id : ids) {
    const auto r = acceptance.run(id);
    std::cout << opb::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
