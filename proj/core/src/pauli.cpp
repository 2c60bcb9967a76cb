#include "lsyk/pauli.hpp"

#include <bit>

#include "lsyk/errors.hpp"

namespace lsyk {

namespace {

std::complex<double> i_power(int p) {
  switch (p & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void require_same_size(const PauliString& a, const PauliString& b) {
  require(a.n_qubits == b.n_qubits, "Pauli strings act on different numbers of qubits");
}

}  // namespace

PauliString majorana(int index, int n_fermions) {
  require(n_fermions >= 2 && n_fermions % 2 == 0 && n_fermions <= 128, "majorana: N must be even, 2 <= N <= 128");
  require(index >= 1 && index <= n_fermions, "majorana: index out of range");
  const int k = (index + 1) / 2;
  const std::uint64_t site = std::uint64_t{1} << (k - 1);
  PauliString p{n_fermions / 2, site, site - 1, 0};
  if (index % 2 == 0) {
    p.z |= site;
    p.phase = 1;  // Y = i X Z
  }
  return p;
}

PauliString multiply(const PauliString& a, const PauliString& b) {
  require_same_size(a, b);
  const int sign_flips = std::popcount(a.z & b.x);
  return {a.n_qubits, a.x ^ b.x, a.z ^ b.z, (a.phase + b.phase + 2 * sign_flips) & 3};
}

PauliString majorana_string(std::span<const int> indices, int n_fermions) {
  require(!indices.empty(), "majorana_string: empty index tuple");
  PauliString p = majorana(indices[0], n_fermions);
  for (std::size_t k = 1; k < indices.size(); ++k) {
    require(indices[k] > indices[k - 1], "majorana_string: indices must be strictly increasing");
    p = multiply(p, majorana(indices[k], n_fermions));
  }
  if (indices.size() % 4 == 2 || indices.size() % 4 == 3) p.phase = (p.phase + 1) & 3;
  return p;
}

bool commutes(const PauliString& a, const PauliString& b) {
  require_same_size(a, b);
  return (std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) % 2 == 0;
}

bool is_hermitian(const PauliString& p) { return (p.phase + std::popcount(p.x & p.z)) % 2 == 0; }

Eigen::MatrixXcd dense(const PauliString& p) {
  require(p.n_qubits <= 12, "dense: too many qubits for a dense oracle");
  const Eigen::Index dim = Eigen::Index{1} << p.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const std::complex<double> phase = i_power(p.phase);
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
    const double sign = std::popcount(p.z & b) % 2 ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(b ^ p.x), static_cast<Eigen::Index>(b)) = phase * sign;
  }
  return m;
}

std::string to_string(Sector s) {
  switch (s) {
    case Sector::even: return "even";
    case Sector::odd: return "odd";
    default: return "full";
  }
}

std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::GOE: return "GOE";
    case SymmetryClass::GUE: return "GUE";
    default: return "GSE";
  }
}

Sector parse_sector(const std::string& text) {
  if (text == "even") return Sector::even;
  if (text == "odd") return Sector::odd;
  if (text == "full") return Sector::full;
  throw ParameterError("unknown sector '" + text + "' (expected even, odd or full)");
}

SymmetryClass parse_symmetry_class(const std::string& text) {
  if (text == "GOE") return SymmetryClass::GOE;
  if (text == "GUE") return SymmetryClass::GUE;
  if (text == "GSE") return SymmetryClass::GSE;
  throw ParameterError("unknown symmetry class '" + text + "'");
}

SymmetryClass symmetry_class(int n_fermions) {
  require(n_fermions >= 2 && n_fermions % 2 == 0, "symmetry_class: N must be even and >= 2");
  switch (n_fermions % 8) {
    case 0: return SymmetryClass::GOE;
    case 4: return SymmetryClass::GSE;
    default: return SymmetryClass::GUE;
  }
}

double HermitianMatrix::trace() const { return is_real ? real.trace() : complex.trace().real(); }

double HermitianMatrix::max_abs() const { return is_real ? real.cwiseAbs().maxCoeff() : complex.cwiseAbs().maxCoeff(); }

std::uint64_t sector_dimension(int n_qubits, Sector sector) {
  require(n_qubits >= 1 && n_qubits <= 30, "sector_dimension: unsupported qubit count");
  const std::uint64_t full = std::uint64_t{1} << n_qubits;
  return sector == Sector::full ? full : full / 2;
}

HermitianMatrix sector_matrix(std::span<const Term> terms, Sector sector, int n_fermions) {
  require(n_fermions >= 2 && n_fermions % 2 == 0, "sector_matrix: N must be even");
  const int n_qubits = n_fermions / 2;
  require(n_qubits <= 15, "sector_matrix: dense storage limited to N <= 30");
  bool real = true;
  for (const Term& t : terms) {
    require(t.op.n_qubits == n_qubits, "sector_matrix: term acts on the wrong number of qubits");
    require(is_hermitian(t.op), "sector_matrix: term is not Hermitian");
    if (sector != Sector::full)
      require(std::popcount(t.op.x) % 2 == 0, "sector_matrix: term breaks fermion parity; use the full space");
    real = real && (t.op.phase % 2 == 0);
  }
  const auto dim = static_cast<Eigen::Index>(sector_dimension(n_qubits, sector));
  const std::uint64_t parity = sector == Sector::odd ? 1 : 0;
  auto state_of = [&](Eigen::Index col) -> std::uint64_t {
    if (sector == Sector::full) return static_cast<std::uint64_t>(col);
    const std::uint64_t high = static_cast<std::uint64_t>(col) << 1;
    return high | ((std::popcount(high) & 1) ^ parity);
  };
  auto index_of = [&](std::uint64_t state) -> Eigen::Index {
    return static_cast<Eigen::Index>(sector == Sector::full ? state : state >> 1);
  };

  HermitianMatrix h;
  h.is_real = real;
  if (real) h.real = Eigen::MatrixXd::Zero(dim, dim);
  else h.complex = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint64_t b = state_of(col);
    for (const Term& t : terms) {
      const Eigen::Index row = index_of(b ^ t.op.x);
      const int phase = (t.op.phase + 2 * (std::popcount(t.op.z & b) & 1)) & 3;
      if (real) h.real(row, col) += phase == 0 ? t.coupling : -t.coupling;
      else h.complex(row, col) += t.coupling * i_power(phase);
    }
  }
  return h;
}

}  // namespace lsyk
