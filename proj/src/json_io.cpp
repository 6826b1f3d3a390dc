#include "opb/json_io.hpp"

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "opb/opb_io.hpp"

namespace opb {

using nlohmann::json;

std::string numeric_to_json(const NumericDocument& doc) {
  const NumericOPB& b = doc.basis;
  json vectors = json::array();
  for (const auto& locals : b.vectors) {
    json row = json::array();
    for (const auto& v : locals) {
      json local = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) local.push_back({v(i).real(), v(i).imag()});
      row.push_back(std::move(local));
    }
    vectors.push_back(std::move(row));
  }
  json out{{"dims", b.dims},
           {"vectors", std::move(vectors)},
           {"metadata", {{"seed", doc.seed}, {"source_key", doc.source_key}, {"tolerance", b.tolerance}}}};
  return out.dump(1) + "\n";
}

NumericDocument numeric_from_json(const std::string& text) {
  NumericDocument doc;
  try {
    const json in = json::parse(text);
    doc.basis.dims = in.at("dims").get<std::vector<int>>();
    for (const auto& row : in.at("vectors")) {
      std::vector<Eigen::VectorXcd> locals;
      for (const auto& local : row) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(local.size()));
        for (std::size_t i = 0; i < local.size(); ++i)
          v(static_cast<Eigen::Index>(i)) = {local[i].at(0).get<double>(), local[i].at(1).get<double>()};
        locals.push_back(std::move(v));
      }
      doc.basis.vectors.push_back(std::move(locals));
    }
    if (in.contains("metadata")) {
      const json& meta = in.at("metadata");
      doc.seed = meta.value("seed", std::uint64_t{0});
      doc.source_key = meta.value("source_key", std::string{});
      doc.basis.tolerance = meta.value("tolerance", 1e-9);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad numeric basis JSON: ") + e.what());
  }
  return doc;
}

std::string store_manifest(const ClassStore& store) {
  std::map<std::string, int> nu;
  for (const auto& [key, info] : store.classes) ++nu[std::to_string(info.signature.nu)];
  json out{{"n", store.n},
           {"complete", store.complete},
           {"maximal_only", store.maximal_only},
           {"classes_stored", store.size()},
           {"classes_seen", store.classes_seen},
           {"maximal", store.maximal_seen},
           {"matrices_canonicalized", store.matrices_canonicalized},
           {"seconds", store.seconds},
           {"nu_histogram", nu},
           {"options",
            {{"maximal_only", store.options.maximal_only},
             {"max_classes", store.options.max_classes},
             {"max_seconds", store.options.max_seconds},
             {"jobs", store.options.jobs}}}};
  return out.dump(2) + "\n";
}

void write_store(const ClassStore& store, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [key, info] : store.classes) {
    const std::string name = key.hex();
    write_text_file_atomic((std::filesystem::path(dir) / (name + ".opb")).string(),
                           serialize(info.representative, Style::kFull, name));
  }
  write_text_file_atomic((std::filesystem::path(dir) / "manifest.json").string(), store_manifest(store));
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace opb
