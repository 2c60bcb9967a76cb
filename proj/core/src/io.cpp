#include "lsyk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lsyk/errors.hpp"

namespace lsyk {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string to_json(const CouplingTensor& couplings) {
  json j;
  j["N"] = couplings.n_fermions;
  j["q"] = couplings.q;
  j["J"] = couplings.J;
  j["mu"] = couplings.mu;
  j["seed"] = couplings.seed;
  j["values"] = couplings.values;
  return j.dump();
}

CouplingTensor coupling_tensor_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    CouplingTensor t;
    t.n_fermions = j.at("N").get<int>();
    t.q = j.at("q").get<int>();
    t.J = j.at("J").get<double>();
    t.mu = j.at("mu").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.values = j.at("values").get<std::vector<double>>();
    require(t.values.size() == binomial(t.n_fermions, t.q), "coupling tensor JSON: wrong number of values");
    return t;
  } catch (const json::exception& e) {
    throw IoError(std::string("coupling tensor JSON: ") + e.what());
  }
}

std::string to_json(const Spectrum& spectrum) {
  const SpectrumMeta& m = spectrum.meta;
  json meta;
  meta["N"] = m.N;
  meta["q"] = m.q;
  meta["mu"] = m.mu;
  meta["J"] = m.J;
  meta["seed"] = m.seed;
  meta["sector"] = to_string(m.sector);
  meta["symmetry_class"] = to_string(m.symmetry);
  meta["deformation"] = to_string(m.deformation);
  meta["kramers_deduped"] = m.kramers_deduped;
  meta["convention"] = m.convention;
  json j;
  j["meta"] = meta;
  j["eigenvalues"] = spectrum.eigenvalues;
  return j.dump();
}

Spectrum spectrum_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const json& meta = j.at("meta");
    Spectrum s;
    s.meta.N = meta.at("N").get<int>();
    s.meta.q = meta.at("q").get<int>();
    s.meta.mu = meta.at("mu").get<double>();
    s.meta.J = meta.at("J").get<double>();
    s.meta.seed = meta.at("seed").get<std::uint64_t>();
    s.meta.sector = parse_sector(meta.at("sector").get<std::string>());
    s.meta.symmetry = parse_symmetry_class(meta.at("symmetry_class").get<std::string>());
    s.meta.deformation = parse_deformation(meta.at("deformation").get<std::string>());
    s.meta.kramers_deduped = meta.value("kramers_deduped", false);
    s.meta.convention = meta.value("convention", std::string());
    s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("spectrum JSON: ") + e.what());
  }
}

std::string to_json(const Sfd& sfd) {
  json pts = json::array();
  for (const SfdPoint& p : sfd.points()) pts.push_back({p.alpha, p.f});
  return json{{"breakpoints", pts}}.dump();
}

std::string spectrum_filename(const SpectrumMeta& meta) {
  return "N" + std::to_string(meta.N) + "_q" + std::to_string(meta.q) + "_mu" + format_number(meta.mu) + "_s" +
         std::to_string(meta.seed) + ".json";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  require(cells.size() == header_.size(), "CsvTable: row width does not match header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

CsvTable CsvTable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV: missing header");
  CsvTable table(split_line(line));
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header_.size()) throw IoError("CSV: ragged row");
    table.rows_.push_back(std::move(cells));
  }
  return table;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  throw IoError("CSV: no column named " + name);
}

}  // namespace lsyk
