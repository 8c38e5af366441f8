#pragma once

// Dense Hermitian eigendecomposition.
//
// Pipeline: unitary Householder reduction to tridiagonal form, a diagonal
// phase similarity that makes the subdiagonal real nonnegative, then
// implicit-shift QL iteration on the real tridiagonal matrix with the
// rotations accumulated into the complex eigenvector matrix. Everything is
// deterministic: identical input bits give identical output bits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/tolerances.hpp"

namespace discrimkit {

// Hermitian matrix with construction-time symmetrization. The stored entries
// satisfy a[i][j] == conj(a[j][i]) exactly; the deviation of the input from
// Hermitian form is recorded and rejected above kRelAsymmetryTol * ||A||_F.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const ComplexMatrix& raw) {
    if (raw.rows() != raw.cols() || raw.rows() == 0)
      throw invalid_input("HermitianMatrix: square matrix of dim >= 1 required");
    const std::size_t n = raw.rows();
    asymmetry_norm_ = frobenius_distance(raw, raw.adjoint());
    const double scale = raw.frobenius_norm();
    if (asymmetry_norm_ > kRelAsymmetryTol * std::max(1.0, scale)) {
      std::ostringstream os;
      os << "HermitianMatrix: input asymmetry " << asymmetry_norm_
         << " exceeds " << kRelAsymmetryTol << " * ||A||_F";
      throw invalid_input(os.str());
    }
    a_ = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      a_(i, i) = cplx{raw(i, i).real(), 0.0};
      for (std::size_t j = i + 1; j < n; ++j) {
        const cplx v = 0.5 * (raw(i, j) + std::conj(raw(j, i)));
        a_(i, j) = v;
        a_(j, i) = std::conj(v);
      }
    }
  }

  std::size_t dim() const { return a_.rows(); }
  const ComplexMatrix& entries() const { return a_; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
  double asymmetry_norm() const { return asymmetry_norm_; }
  double frobenius_norm() const { return a_.frobenius_norm(); }

 private:
  ComplexMatrix a_;
  double asymmetry_norm_ = 0.0;
};

// Eigenvalues ascending; eigenvectors_ column k pairs with eigenvalues[k].
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexMatrix reconstruct() const {
    const std::size_t n = eigenvalues.size();
    ComplexMatrix scaled = eigenvectors;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= eigenvalues[j];
    return scaled * eigenvectors.adjoint();
  }
};

namespace detail {

// Householder reduction A -> Q T Q^dagger with T tridiagonal. On return
// `diag` holds the real diagonal and `sub` the (still complex) subdiagonal;
// `q` accumulates the unitary similarity.
inline void tridiagonalize(ComplexMatrix& a, ComplexMatrix& q,
                           std::vector<double>& diag, std::vector<cplx>& sub) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double col_norm_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) col_norm_sq += std::norm(a(i, k));
    double tail_sq = col_norm_sq - std::norm(a(k + 1, k));
    if (tail_sq <= 0.0) continue;  // column already tridiagonal here

    const double col_norm = std::sqrt(col_norm_sq);
    const cplx lead = a(k + 1, k);
    const cplx phase =
        (std::abs(lead) > 0.0) ? lead / std::abs(lead) : cplx{1.0, 0.0};
    const cplx alpha = -phase * col_norm;

    // v = x - alpha * e1, reflector H = I - beta v v^dagger.
    std::vector<cplx> v(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) v[i - k - 1] = a(i, k);
    v[0] -= alpha;
    double vnorm_sq = 0.0;
    for (const cplx& t : v) vnorm_sq += std::norm(t);
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;

    // Two-sided update of the trailing block: A := A - v w^dagger - w v^dagger
    // with p = beta A v and w = p - (beta/2)(v^dagger p) v.
    const std::size_t m = n - k - 1;
    std::vector<cplx> p(m, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i) {
      cplx s{0.0, 0.0};
      for (std::size_t j = 0; j < m; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
      p[i] = beta * s;
    }
    cplx vtp{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) vtp += std::conj(v[i]) * p[i];
    const cplx mu = 0.5 * beta * vtp;
    std::vector<cplx> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - mu * v[i];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a(k + 1 + i, k + 1 + j) -=
            v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);

    a(k + 1, k) = alpha;
    a(k, k + 1) = std::conj(alpha);
    for (std::size_t i = k + 2; i < n; ++i) {
      a(i, k) = cplx{0.0, 0.0};
      a(k, i) = cplx{0.0, 0.0};
    }

    // Q := Q H (right-multiply rows of Q by the reflector).
    for (std::size_t r = 0; r < n; ++r) {
      cplx dot{0.0, 0.0};
      for (std::size_t j = 0; j < m; ++j) dot += q(r, k + 1 + j) * v[j];
      dot *= beta;
      for (std::size_t j = 0; j < m; ++j)
        q(r, k + 1 + j) -= dot * std::conj(v[j]);
    }
  }

  diag.resize(n);
  sub.assign(n > 1 ? n - 1 : 0, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = a(i + 1, i);
}

// Diagonal phase similarity making the subdiagonal real nonnegative.
inline void realify_subdiagonal(ComplexMatrix& q, std::vector<cplx>& sub,
                                std::vector<double>& e) {
  const std::size_t n = q.rows();
  e.assign(n > 1 ? n - 1 : 0, 0.0);
  cplx phase{1.0, 0.0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mag = std::abs(sub[i]);
    e[i] = mag;
    if (mag > 0.0) phase *= sub[i] / mag;
    if (phase != cplx{1.0, 0.0})
      for (std::size_t r = 0; r < n; ++r) q(r, i + 1) *= phase;
  }
}

// Implicit-shift QL iteration on the real tridiagonal (d, e), rotations
// accumulated into the complex columns of z. Total iteration budget is
// 64 * n; exceeding it raises numerical_error.
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                        ComplexMatrix& z) {
  const std::size_t n = d.size();
  if (n < 2) return;
  const double eps = std::numeric_limits<double>::epsilon();
  const std::size_t max_total = 64 * n;
  std::size_t total_iter = 0;

  e.push_back(0.0);  // sentinel e[n-1]
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++total_iter > max_total) {
        double off = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) off += e[i] * e[i];
        std::ostringstream os;
        os << "eig_hermitian: QL iteration cap (" << max_total
           << ") exceeded; remaining off-diagonal norm " << std::sqrt(off);
        throw numerical_error(os.str());
      }

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < z.rows(); ++k) {
          const cplx fz = z(k, ii + 1);
          z(k, ii + 1) = s * z(k, ii) + c * fz;
          z(k, ii) = c * z(k, ii) - s * fz;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  e.pop_back();
}

// Ascending eigenvalue order plus a canonical phase per eigenvector: the
// largest-magnitude component (first such index) is made real positive.
inline void sort_and_normalize(std::vector<double>& d, ComplexMatrix& z) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  std::vector<double> sorted(n);
  ComplexMatrix sorted_vecs(n, n);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t src = order[jj];
    sorted[jj] = d[src];
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(z(i, src));
      if (mag > best) {
        best = mag;
        imax = i;
      }
    }
    const cplx pivot = z(imax, src);
    const cplx rot =
        (std::abs(pivot) > 0.0) ? std::conj(pivot) / std::abs(pivot)
                                : cplx{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) sorted_vecs(i, jj) = z(i, src) * rot;
  }
  d = std::move(sorted);
  z = std::move(sorted_vecs);
}

}  // namespace detail

inline EigenDecomposition eig_hermitian(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.entries();
  ComplexMatrix q = ComplexMatrix::identity(n);

  std::vector<double> d;
  std::vector<cplx> sub;
  detail::tridiagonalize(a, q, d, sub);

  std::vector<double> e;
  detail::realify_subdiagonal(q, sub, e);
  detail::ql_implicit(d, e, q);
  detail::sort_and_normalize(d, q);

  return EigenDecomposition{std::move(d), std::move(q)};
}

}  // namespace discrimkit
