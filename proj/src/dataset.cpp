#include "opb/dataset.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace opb {

std::vector<std::string> collection_names() {
  std::set<std::string> names;
  for (const auto& f : data_files())
    if (f.file.ends_with(".opb")) names.insert(f.collection);
  return {names.begin(), names.end()};
}

std::vector<NamedMatrix> collection(const std::string& name) {
  std::vector<NamedMatrix> out;
  for (const auto& f : data_files()) {
    if (f.collection != name || !f.file.ends_with(".opb")) continue;
    NamedMatrix entry{f.file, read_opb(f.text), std::nullopt};
    if (!entry.source.fragment) entry.matrix = to_matrix(entry.source);
    out.push_back(std::move(entry));
  }
  if (out.empty()) throw std::out_of_range("no data collection named '" + name + "'");
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
  return out;
}

const std::string& data_text(const std::string& collection, const std::string& file) {
  for (const auto& f : data_files())
    if (f.collection == collection && f.file == file) return f.text;
  throw std::out_of_range("no data file " + collection + "/" + file);
}

}  // namespace opb
