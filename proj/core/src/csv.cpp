#include "spindec/csv.hpp"

#include "spindec/error.hpp"
#include "spindec/numeric.hpp"
#include "spindec/version.hpp"

namespace spindec {

CsvWriter::CsvWriter(const std::filesystem::path& path, const Provenance& prov) {
  out_.open(path, std::ios::binary);
  if (!out_) throw Error("csv: cannot write " + path.string());
  out_ << "# spindec " << kVersion << "\n";
  out_ << "# config_hash: " << prov.config_hash << "\n";
  out_ << "# seed: " << prov.seed << "\n";
  out_ << "# bundle: " << prov.bundle_provenance << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << "\n";
}

std::string CsvWriter::cell(double v) { return format_double(v); }

std::string CsvWriter::cell(int v) { return std::to_string(v); }

std::string CsvWriter::cell(std::uint64_t v) { return std::to_string(v); }

std::string CsvWriter::cell(const std::string& text) {
  const bool needs_quoting =
      text.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quoting) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string config_hash(const std::string& canonical_config) {
  return to_hex(fnv1a64(canonical_config));
}

}  // namespace spindec
