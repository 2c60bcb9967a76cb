#include "lsyk/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <lapacke.h>

#include "lsyk/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace lsyk {

SpectrumMeta make_meta(const SykConfig& config) {
  SpectrumMeta meta;
  meta.N = config.N;
  meta.q = config.q;
  meta.mu = config.mu;
  meta.J = config.J;
  meta.seed = config.seed;
  meta.sector = config.effective_sector();
  meta.symmetry = symmetry_class(config.N);
  meta.deformation = config.deformation;
  return meta;
}

void pin_solver_threads() { openblas_set_num_threads(1); }

namespace {

void check_hermitian(const HermitianMatrix& h, double tol) {
  const double scale = std::max(1.0, h.max_abs());
  const double asym = h.is_real ? (h.real - h.real.transpose()).cwiseAbs().maxCoeff()
                                : (h.complex - h.complex.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol * scale)
    throw ParameterError("full_spectrum: matrix is not Hermitian (max |H - H^dagger| = " + std::to_string(asym) + ")");
}

}  // namespace

Spectrum full_spectrum(const HermitianMatrix& h, const SpectrumMeta& meta, const EigenOptions& options) {
  const Eigen::Index dim = h.dim();
  require(dim > 0, "full_spectrum: empty matrix");
  check_hermitian(h, options.hermitian_tol);
  const char jobz = options.check_residual ? 'V' : 'N';
  const auto n = static_cast<lapack_int>(dim);
  Spectrum out{std::vector<double>(static_cast<std::size_t>(dim)), meta};
  lapack_int info = 0;
  Eigen::MatrixXd work_real;
  Eigen::MatrixXcd work_complex;
  if (h.is_real) {
    work_real = h.real;
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, work_real.data(), n, out.eigenvalues.data());
  } else {
    work_complex = h.complex;
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, reinterpret_cast<lapack_complex_double*>(work_complex.data()), n,
                          out.eigenvalues.data());
  }
  if (info != 0)
    throw NumericalError("full_spectrum: LAPACK " + std::string(h.is_real ? "dsyevd" : "zheevd") + " failed with info = " +
                         std::to_string(info) + " (dimension " + std::to_string(dim) + ")");
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());

  if (options.check_residual) {
    const double scale = std::max(1.0, h.max_abs());
    const Eigen::Map<const Eigen::VectorXd> lambda(out.eigenvalues.data(), dim);
    double worst = 0.0;
    if (h.is_real) {
      worst = ((h.real * work_real) - work_real * lambda.asDiagonal()).cwiseAbs().maxCoeff();
    } else {
      worst = ((h.complex * work_complex) - work_complex * lambda.cast<std::complex<double>>().asDiagonal()).cwiseAbs().maxCoeff();
    }
    if (worst > options.residual_tol * scale)
      throw NumericalError("full_spectrum: eigen-residual " + std::to_string(worst) + " exceeds tolerance");
  }
  return out;
}

double kramers_pair_gap(const std::vector<double>& eigenvalues) {
  require(eigenvalues.size() % 2 == 0, "kramers_pair_gap: odd number of levels");
  double scale = 0.0;
  for (double e : eigenvalues) scale = std::max(scale, std::abs(e));
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < eigenvalues.size(); i += 2) worst = std::max(worst, eigenvalues[i + 1] - eigenvalues[i]);
  return scale > 0.0 ? worst / scale : worst;
}

Spectrum dedupe_kramers(const Spectrum& spectrum, double tol) {
  require(spectrum.meta.symmetry == SymmetryClass::GSE, "dedupe_kramers: spectrum is not in the GSE class");
  require(!spectrum.meta.kramers_deduped, "dedupe_kramers: spectrum already deduplicated");
  const auto& ev = spectrum.eigenvalues;
  require(ev.size() % 2 == 0, "dedupe_kramers: odd number of levels, symmetry class is likely wrong");
  const double gap = kramers_pair_gap(ev);
  if (gap > tol)
    throw NumericalError("dedupe_kramers: unpaired level (relative in-pair gap " + std::to_string(gap) +
                         "), symmetry class is likely wrong");
  Spectrum out{{}, spectrum.meta};
  out.meta.kramers_deduped = true;
  out.eigenvalues.reserve(ev.size() / 2);
  for (std::size_t i = 0; i < ev.size(); i += 2) out.eigenvalues.push_back(ev[i]);
  return out;
}

}  // namespace lsyk
