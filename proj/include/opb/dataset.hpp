#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opb/opb_io.hpp"

namespace opb {

/// A file compiled into the library from the data/ tree.
struct DataFile {
  std::string collection;  // directory under data/
  std::string file;        // base name
  std::string text;
};

const std::vector<DataFile>& data_files();

struct NamedMatrix {
  std::string file;
  OpbFile source;
  std::optional<PatternMatrix> matrix;  // empty for fragments
};

std::vector<std::string> collection_names();

/// Parsed members of one collection in file-name order. Throws
/// std::out_of_range for an unknown name.
std::vector<NamedMatrix> collection(const std::string& name);

/// Raw text of data/<collection>/<file>; std::out_of_range when absent.
const std::string& data_text(const std::string& collection, const std::string& file);

}  // namespace opb
