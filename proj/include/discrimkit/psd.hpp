#pragma once

// Tolerance-based positive-semidefiniteness testing and eigenvalue-clamped
// square-root factorization of PSD matrices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "discrimkit/eig.hpp"
#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/tolerances.hpp"

namespace discrimkit {

struct PsdVerdict {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  double tolerance_used = 0.0;

  // Boundary cases (optimal strategies live there) count as PSD; this flag
  // marks a smallest eigenvalue within +/- tolerance of zero.
  bool on_boundary() const {
    return is_psd && min_eigenvalue <= tolerance_used;
  }
};

inline double default_psd_scale(const HermitianMatrix& a) {
  return std::max(1.0, a.frobenius_norm());
}

inline PsdVerdict psd_check(const HermitianMatrix& a, double scale) {
  if (!(scale > 0.0)) throw invalid_input("psd_check: scale must be positive");
  const EigenDecomposition ed = eig_hermitian(a);
  PsdVerdict v;
  v.tolerance_used = kRelPsdTol * scale;
  v.min_eigenvalue = ed.eigenvalues.front();
  v.is_psd = v.min_eigenvalue >= -v.tolerance_used;
  return v;
}

inline PsdVerdict psd_check(const HermitianMatrix& a) {
  return psd_check(a, default_psd_scale(a));
}

// Factor a PSD matrix as F F^dagger with F of dim x r, r the numerical rank
// at kRelRankTol * ||A||_F. Eigenvalues within tolerance below zero are
// clamped to zero; anything more negative is a hard error. Columns are
// ordered by descending eigenvalue.
inline ComplexMatrix psd_factor(const HermitianMatrix& a, double scale) {
  if (!(scale > 0.0)) throw invalid_input("psd_factor: scale must be positive");
  const std::size_t n = a.dim();
  const EigenDecomposition ed = eig_hermitian(a);
  const double psd_tol = kRelPsdTol * scale;
  if (ed.eigenvalues.front() < -psd_tol) {
    std::ostringstream os;
    os << "psd_factor: matrix is not PSD (min eigenvalue "
       << ed.eigenvalues.front() << ", tolerance " << psd_tol << ")";
    throw invalid_input(os.str());
  }

  const double rank_tol = kRelRankTol * a.frobenius_norm();
  std::size_t r = 0;
  for (double lam : ed.eigenvalues)
    if (lam > rank_tol) ++r;

  ComplexMatrix f(n, r);
  // eigenvalues ascend, so walk from the top for descending column order
  for (std::size_t c = 0; c < r; ++c) {
    const std::size_t k = n - 1 - c;
    const double root = std::sqrt(std::max(ed.eigenvalues[k], 0.0));
    for (std::size_t i = 0; i < n; ++i) f(i, c) = root * ed.eigenvectors(i, k);
  }
  return f;
}

inline ComplexMatrix psd_factor(const HermitianMatrix& a) {
  return psd_factor(a, default_psd_scale(a));
}

}  // namespace discrimkit
