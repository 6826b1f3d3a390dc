#pragma once

#include <cstdint>
#include <string>

#include "opb/lattice.hpp"
#include "opb/numeric.hpp"

namespace opb {

struct NumericDocument {
  NumericOPB basis;
  std::uint64_t seed = 0;
  std::string source_key;  // canonical key hex of the pattern, if any
};

/// {"dims": [...], "vectors": [[[[re, im], ...], ...], ...],
///  "metadata": {"seed": s, "source_key": "...", "tolerance": t}}
/// Doubles are written with 17 significant digits.
std::string numeric_to_json(const NumericDocument& doc);

/// Throws ParseError on malformed input.
NumericDocument numeric_from_json(const std::string& text);

/// Summary of a store as JSON (counts, flags, options).
std::string store_manifest(const ClassStore& store);

/// One <key-hex>.opb per stored class plus manifest.json, each written
/// atomically. The directory is created when missing.
void write_store(const ClassStore& store, const std::string& dir);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace opb
