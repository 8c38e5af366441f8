#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "discrimkit/eig.hpp"
#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/psd.hpp"
#include "discrimkit/state_set.hpp"
#include "discrimkit/strategy.hpp"

namespace discrimkit {

// Explicit realization of a feasible strategy. The 2n output coordinates
// are ordered (phi_1 P_0, ..., phi_n P_0, phi_1 P_1, ..., phi_n P_1):
// first block conclusive, second block inconclusive. The input states are
// never materialized; they live as coordinates in the r-dimensional span
// recovered from the Gram factorization X = L L^dagger.
struct Realization {
  std::size_t n = 0;
  long long copies = 1;
  std::size_t span_rank = 0;
  ComplexMatrix images{0, 0};       // n x 2n, row i = output image of state i
  ComplexMatrix completion{0, 0};   // C of Eq-style padding: n x n
  ComplexMatrix span_coords{0, 0};  // n x r, row i = input coordinates psi_i
  ComplexMatrix isometry{0, 0};     // 2n x r, maps span coords to images
  ComplexMatrix completed_unitary{0, 0};  // (r + 2n) square when built

  std::size_t output_dim() const { return 2 * n; }
  std::size_t workspace_dim() const { return span_rank + 2 * n; }
};

namespace detail {

// two-pass modified Gram-Schmidt; assumes numerically full column rank
inline void mgs_orthonormalize(ComplexMatrix& v) {
  const std::size_t rows = v.rows(), cols = v.cols();
  for (std::size_t j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx proj{0.0, 0.0};
        for (std::size_t i = 0; i < rows; ++i)
          proj += std::conj(v(i, k)) * v(i, j);
        for (std::size_t i = 0; i < rows; ++i) v(i, j) -= proj * v(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += std::norm(v(i, j));
    norm = std::sqrt(norm);
    if (!(norm > 0.0))
      throw numerical_error("mgs_orthonormalize: column collapsed");
    for (std::size_t i = 0; i < rows; ++i) v(i, j) /= norm;
  }
}

}  // namespace detail

// Builds the output images, span coordinates and the span-to-output
// isometry for a feasible (X, s) pair.
inline Realization synthesize(const GramMatrix& x, const Strategy& s) {
  const std::size_t n = s.n();
  const FeasibilityReport feas = feasibility(x, s);
  if (!feas.verdict.is_psd) {
    std::ostringstream os;
    os << "synthesize: strategy infeasible (residual min eigenvalue "
       << feas.verdict.min_eigenvalue << ", tolerance "
       << feas.verdict.tolerance_used << ")";
    throw invalid_input(os.str());
  }

  Realization r;
  r.n = n;
  r.copies = x.copies();

  // C zero-padded to n columns so c_ij indexing always covers j = 1..n
  r.completion = ComplexMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < feas.completion.cols(); ++j)
      r.completion(i, j) = feas.completion(i, j);

  // row i of [B | C], conjugated so the image Gram lands on X exactly:
  // <image_i|image_j> = (BB^dagger + CC^dagger)_ij
  const ComplexMatrix b = build_b(s);
  r.images = ComplexMatrix(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r.images(i, j) = std::conj(b(i, j));
      r.images(i, n + j) = std::conj(r.completion(i, j));
    }
  }

  // span coordinates from X = L L^dagger, L = W_r Lambda_r^(1/2)
  const EigenDecomposition xd = eig_hermitian(x.powered());
  const double rank_tol = kRelRankTol * x.powered().frobenius_norm();
  std::size_t rank = 0;
  for (double lam : xd.eigenvalues)
    if (lam > rank_tol) ++rank;
  if (rank == 0)
    throw numerical_error("synthesize: Gram matrix has numerical rank 0");
  r.span_rank = rank;

  r.span_coords = ComplexMatrix(n, rank);
  ComplexMatrix w_scaled(n, rank);  // W_r Lambda_r^(-1/2)
  for (std::size_t c = 0; c < rank; ++c) {
    const std::size_t k = n - 1 - c;  // descending eigenvalue order
    const double root = std::sqrt(xd.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      r.span_coords(i, c) = std::conj(root * xd.eigenvectors(i, k));
      w_scaled(i, c) = xd.eigenvectors(i, k) / root;
    }
  }

  // isometry V with V psi_i = image_i: V = IMG W_r Lambda_r^(-1/2) where
  // IMG stacks the images as columns, then an orthonormality polish
  // (exact arithmetic would make V orthonormal already, so the polish
  // only removes rounding)
  r.isometry = ComplexMatrix(2 * n, rank);
  for (std::size_t k = 0; k < 2 * n; ++k)
    for (std::size_t c = 0; c < rank; ++c) {
      cplx acc{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) acc += r.images(i, k) * w_scaled(i, c);
      r.isometry(k, c) = acc;
    }
  detail::mgs_orthonormalize(r.isometry);
  return r;
}

// Extends the span-to-output isometry to a unitary on a workspace of
// dimension r + 2n: input span axes first, output block last. Columns
// [0, r) embed the isometry; the rest come from pivoted orthogonalization
// of the standard basis in index order.
inline Realization complete_unitary(Realization r) {
  const std::size_t n = r.n;
  const std::size_t rank = r.span_rank;
  const std::size_t big = rank + 2 * n;
  if (r.isometry.rows() != 2 * n || r.isometry.cols() != rank)
    throw invalid_input("complete_unitary: realization has no valid isometry");

  ComplexMatrix u(big, big);
  for (std::size_t c = 0; c < rank; ++c)
    for (std::size_t i = 0; i < 2 * n; ++i)
      u(rank + i, c) = r.isometry(i, c);

  std::size_t filled = rank;
  std::vector<cplx> cand(big);
  for (std::size_t axis = 0; axis < big && filled < big; ++axis) {
    for (std::size_t i = 0; i < big; ++i) cand[i] = cplx{0.0, 0.0};
    cand[axis] = cplx{1.0, 0.0};
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < filled; ++k) {
        cplx proj{0.0, 0.0};
        for (std::size_t i = 0; i < big; ++i)
          proj += std::conj(u(i, k)) * cand[i];
        for (std::size_t i = 0; i < big; ++i) cand[i] -= proj * u(i, k);
      }
    }
    double norm = 0.0;
    for (const cplx& v : cand) norm += std::norm(v);
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // axis already covered by the range
    for (std::size_t i = 0; i < big; ++i) u(i, filled) = cand[i] / norm;
    ++filled;
  }
  if (filled != big)
    throw numerical_error("complete_unitary: could not complete the basis");
  r.completed_unitary = std::move(u);
  return r;
}

// Raw squared magnitudes of the output image of state i, indexed by the
// fixed outcome order. Sums to X_ii = 1 up to rounding; no renormalization.
inline std::vector<double> outcome_distribution(const Realization& r,
                                                std::size_t state) {
  if (state >= r.n)
    throw invalid_input("outcome_distribution: state index " +
                        std::to_string(state) + " out of range");
  std::vector<double> p(2 * r.n);
  for (std::size_t k = 0; k < 2 * r.n; ++k) p[k] = std::norm(r.images(state, k));
  return p;
}

struct OutcomeVerdict {
  bool determined = false;   // probe read P_0: announce a state
  std::size_t state = 0;     // announced state, valid when determined
};

inline OutcomeVerdict outcome_verdict(std::size_t n, std::size_t outcome) {
  if (outcome >= 2 * n)
    throw invalid_input("outcome_verdict: outcome index out of range");
  OutcomeVerdict v;
  v.determined = outcome < n;
  v.state = outcome < n ? outcome : outcome - n;
  return v;
}

struct OutcomeMarginals {
  double detected = 0.0;
  double misidentified = 0.0;
  double inconclusive = 0.0;
};

// Collapses a 2n outcome distribution for true state i into the three
// verdict classes, accumulating in ascending outcome order.
inline OutcomeMarginals outcome_marginals(const std::vector<double>& dist,
                                          std::size_t n, std::size_t state) {
  if (dist.size() != 2 * n)
    throw invalid_input("outcome_marginals: distribution size mismatch");
  OutcomeMarginals m;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == state)
      m.detected += dist[k];
    else
      m.misidentified += dist[k];
  }
  for (std::size_t k = n; k < 2 * n; ++k) m.inconclusive += dist[k];
  return m;
}

}  // namespace discrimkit
