#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace spindec {

// Reproducibility stamp carried at the top of every output file.
struct Provenance {
  std::string config_hash;  // 16 hex digits over the canonical config string
  std::uint64_t seed = 0;
  std::string bundle_provenance;
};

// RFC-4180-style CSV with a '#'-prefixed provenance preamble.  All numbers go
// through shortest-round-trip formatting, so identical inputs produce
// byte-identical files; infinities render as the literal token `inf`.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Provenance& prov);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

  static std::string cell(double v);
  static std::string cell(int v);
  static std::string cell(std::uint64_t v);
  static std::string cell(const std::string& text);  // quoted when needed

 private:
  std::ofstream out_;
};

std::string config_hash(const std::string& canonical_config);

}  // namespace spindec
