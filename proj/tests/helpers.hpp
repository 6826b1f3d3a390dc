#pragma once

#include <random>
#include <string>

#include "opb/dataset.hpp"
#include "opb/pattern.hpp"

namespace testing_support {

inline opb::PatternMatrix load(const std::string& collection, const std::string& file) {
  for (const auto& f : opb::collection(collection))
    if (f.file == file) return f.matrix.value();
  throw std::out_of_range(collection + "/" + file);
}

inline opb::PatternMatrix matrix_from_text(const std::string& text) { return opb::parse(text); }

}  // namespace testing_support
