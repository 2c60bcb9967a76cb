#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsyk {

/// i^phase * X^x * Z^z over n_qubits qubits; qubit k (1-based) is bit k-1.
struct PauliString {
  int n_qubits = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  int phase = 0;  ///< power of i, in [0, 4)

  bool operator==(const PauliString&) const = default;
};

PauliString majorana(int index, int n_fermions);
PauliString multiply(const PauliString& a, const PauliString& b);
/// Product of the Majoranas in `indices`, times i when that product is anti-Hermitian
/// (length = 2 mod 4), so the result is always Hermitian.
PauliString majorana_string(std::span<const int> indices, int n_fermions);
bool commutes(const PauliString& a, const PauliString& b);
bool is_hermitian(const PauliString& p);
/// Dense 2^n x 2^n matrix; test oracle only.
Eigen::MatrixXcd dense(const PauliString& p);

enum class Sector { even, odd, full };
enum class SymmetryClass { GOE, GUE, GSE };

std::string to_string(Sector s);
std::string to_string(SymmetryClass c);
Sector parse_sector(const std::string& text);
SymmetryClass parse_symmetry_class(const std::string& text);

/// Gaussian ensemble class of the parity-resolved Hamiltonian, by N mod 8.
SymmetryClass symmetry_class(int n_fermions);

struct Term {
  double coupling;
  PauliString op;
};

/// Dense Hermitian matrix; the real member is used when every entry is real.
struct HermitianMatrix {
  bool is_real = true;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd complex;

  Eigen::Index dim() const noexcept { return is_real ? real.rows() : complex.rows(); }
  std::complex<double> operator()(Eigen::Index i, Eigen::Index j) const {
    return is_real ? std::complex<double>(real(i, j), 0.0) : complex(i, j);
  }
  Eigen::MatrixXcd to_complex() const { return is_real ? real.cast<std::complex<double>>().eval() : complex; }
  double trace() const;
  double max_abs() const;
};

/// Sector bases are the computational states of matching popcount parity, in increasing
/// order; state b sits at index b >> 1.
std::uint64_t sector_dimension(int n_qubits, Sector sector);
HermitianMatrix sector_matrix(std::span<const Term> terms, Sector sector, int n_fermions);

}  // namespace lsyk
