#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opb/pattern.hpp"

namespace opb {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntactic content of a .opb file.
///
///     # comment
///     n: 3
///     name: irreducible-shorthand
///     signature: 3,1 | 3,1 | 3,1
///     nu: 6
///     0 0 0
///     * 1 0
///     ...
///
/// Tokens are `0`, `1`, `*` or an identifier `[a-z][a-z0-9]*`, optionally
/// followed by `'` for the perpendicular.
struct OpbFile {
  int n = 0;
  std::string name;
  std::optional<Signature> expected_signature;
  std::optional<int> expected_nu;
  std::optional<int> group;
  bool fragment = false;  // a block of rows, not a whole matrix
  std::vector<std::vector<std::string>> rows;
};

OpbFile read_opb(const std::string& text);

/// Rows after undoing the `*` shorthand and the 0/1 normalization, as
/// display tokens ("d", "d'", ...). Fresh variables get names unused in
/// the file.
std::vector<std::vector<std::string>> expand_rows(const OpbFile& file);

/// The expanded matrix without validation; fragments are rejected.
PatternMatrix to_matrix(const OpbFile& file);

/// to_matrix plus require_valid.
PatternMatrix parse(const std::string& text);

enum class Style { kFull, kCompact };

std::string serialize(const PatternMatrix& m, Style style = Style::kFull, const std::string& name = {});

std::string read_text_file(const std::string& path);

/// Writes through a temporary file and a rename.
void write_text_file_atomic(const std::string& path, const std::string& text);

}  // namespace opb
