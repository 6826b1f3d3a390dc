#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "opb/lattice.hpp"

namespace opb {

/// Random row order, column order, relabeling and polarity flips.
PatternMatrix scramble(const PatternMatrix& m, std::mt19937_64& rng);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::string format_result(const CriterionResult& r);

/// Runs the acceptance criteria. Class stores are computed once and
/// shared between criteria.
class Acceptance {
 public:
  using Log = std::function<void(const std::string&)>;

  explicit Acceptance(Log log = {});
  ~Acceptance();

  static constexpr int kCriteria = 9;
  static std::string title(int id);

  CriterionResult run(int id);
  std::vector<CriterionResult> run_all(const std::vector<int>& ids);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Edge list "lower-key-hex upper-key-hex" per line, sorted.
std::string hasse_edge_text(const HasseDiagram& h);

}  // namespace opb
