#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace fluxq {

/// Text of a built-in DTD: "bib" or "auction". Throws Error otherwise.
const std::string& builtin_dtd(const std::string& name);
bool is_builtin_dtd(const std::string& name);

struct DataSpec {
  std::string schema;  // "bib" or "auction"
  std::size_t size = 10000;  // target bytes, met within 10% above 4 KB
  std::uint64_t seed = 0;
};

/// Random document valid for the built-in DTD. Equal inputs give equal documents.
std::string generate_data(const DataSpec& spec);

}  // namespace fluxq
