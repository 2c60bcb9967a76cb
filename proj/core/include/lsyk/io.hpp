#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lsyk/eigensolver.hpp"
#include "lsyk/sfd.hpp"
#include "lsyk/stable.hpp"

namespace lsyk {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

std::string to_json(const CouplingTensor& couplings);
CouplingTensor coupling_tensor_from_json(const std::string& text);

std::string to_json(const Spectrum& spectrum);
Spectrum spectrum_from_json(const std::string& text);

std::string to_json(const Sfd& sfd);

/// N{N}_q{q}_mu{mu}_s{seed}.json
std::string spectrum_filename(const SpectrumMeta& meta);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Flat `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::string str() const;

  static CsvTable parse(const std::string& text);
  /// Column index by header name.
  std::size_t column(const std::string& name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace lsyk
