#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "discrimkit/eig.hpp"
#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/tolerances.hpp"

namespace discrimkit {

// <a|b>, conjugate-linear in the first argument.
inline cplx inner_product(const std::vector<cplx>& a,
                          const std::vector<cplx>& b) {
  if (a.size() != b.size())
    throw invalid_input("inner_product: vectors have lengths " +
                        std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

namespace detail {

inline cplx ipow(cplx z, long long m) {
  cplx acc{1.0, 0.0};
  while (m > 0) {
    if (m & 1) acc *= z;
    z *= z;
    m >>= 1;
  }
  return acc;
}

}  // namespace detail

// n pure states in a d-dimensional space with priors and a copy count.
// Amplitudes are normalized at load; the applied correction per state is
// kept so callers can warn when it exceeds kNormWarnTol.
class StateSet {
 public:
  StateSet(std::vector<std::vector<cplx>> amplitudes,
           std::vector<double> priors, long long copies)
      : amplitudes_(std::move(amplitudes)),
        priors_(std::move(priors)),
        copies_(copies) {
    if (amplitudes_.empty()) throw invalid_input("StateSet: no states given");
    const std::size_t d = amplitudes_[0].size();
    if (d == 0) throw invalid_input("StateSet: states must have dimension >= 1");
    if (copies_ < 1)
      throw invalid_input("StateSet: copies must be >= 1, got " +
                          std::to_string(copies_));
    corrections_.resize(amplitudes_.size(), 0.0);
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
      if (amplitudes_[i].size() != d)
        throw invalid_input("StateSet: state " + std::to_string(i) +
                            " has dimension " +
                            std::to_string(amplitudes_[i].size()) +
                            ", expected " + std::to_string(d));
      double norm_sq = 0.0;
      for (const cplx& a : amplitudes_[i]) norm_sq += std::norm(a);
      const double norm = std::sqrt(norm_sq);
      if (norm == 0.0)
        throw invalid_input("StateSet: state " + std::to_string(i) +
                            " is the zero vector");
      corrections_[i] = std::abs(norm - 1.0);
      for (cplx& a : amplitudes_[i]) a /= norm;
    }
    if (priors_.empty()) {
      priors_.assign(amplitudes_.size(),
                     1.0 / static_cast<double>(amplitudes_.size()));
    } else {
      if (priors_.size() != amplitudes_.size())
        throw invalid_input("StateSet: " + std::to_string(priors_.size()) +
                            " priors for " +
                            std::to_string(amplitudes_.size()) + " states");
      double sum = 0.0;
      for (std::size_t i = 0; i < priors_.size(); ++i) {
        if (priors_[i] < 0.0)
          throw invalid_input("StateSet: prior " + std::to_string(i) +
                              " is negative");
        sum += priors_[i];
      }
      if (std::abs(sum - 1.0) > kPriorSumTol)
        throw invalid_input("StateSet: priors sum to " + std::to_string(sum) +
                            ", expected 1");
    }
  }

  StateSet(std::vector<std::vector<cplx>> amplitudes, long long copies)
      : StateSet(std::move(amplitudes), {}, copies) {}

  std::size_t n() const { return amplitudes_.size(); }
  std::size_t dim() const { return amplitudes_[0].size(); }
  long long copies() const { return copies_; }
  const std::vector<cplx>& state(std::size_t i) const { return amplitudes_[i]; }
  const std::vector<double>& priors() const { return priors_; }
  double prior(std::size_t i) const { return priors_[i]; }
  const std::vector<double>& normalization_corrections() const {
    return corrections_;
  }
  double max_normalization_correction() const {
    double m = 0.0;
    for (double c : corrections_) m = std::max(m, c);
    return m;
  }

 private:
  std::vector<std::vector<cplx>> amplitudes_;
  std::vector<double> priors_;
  long long copies_;
  std::vector<double> corrections_;
};

// Base Gram <psi_i|psi_j> and its entrywise M-th power, which equals the
// Gram matrix of the M-fold tensor powers without materializing them.
class GramMatrix {
 public:
  explicit GramMatrix(const StateSet& s)
      : copies_(s.copies()),
        base_(build_base(s)),
        powered_(power(base_, copies_)) {}

  // Treats x itself as the single-copy Gram matrix of some state family.
  static GramMatrix from_matrix(const HermitianMatrix& x,
                                long long copies = 1) {
    if (copies < 1)
      throw invalid_input("GramMatrix: copies must be >= 1, got " +
                          std::to_string(copies));
    return GramMatrix(validate(x), copies);
  }

  const HermitianMatrix& base() const { return base_; }
  const HermitianMatrix& powered() const { return powered_; }
  long long copies() const { return copies_; }
  std::size_t size() const { return base_.dim(); }

 private:
  GramMatrix(HermitianMatrix base, long long copies)
      : copies_(copies), base_(std::move(base)), powered_(power(base_, copies_)) {}

  static HermitianMatrix build_base(const StateSet& s) {
    const std::size_t n = s.n();
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      g(i, i) = cplx{1.0, 0.0};
      for (std::size_t j = i + 1; j < n; ++j) {
        cplx v = inner_product(s.state(i), s.state(j));
        const double mag = std::abs(v);
        if (mag > 1.0) v /= mag;
        g(i, j) = v;
        g(j, i) = std::conj(v);
      }
    }
    return HermitianMatrix(g);
  }

  static HermitianMatrix validate(const HermitianMatrix& x) {
    ComplexMatrix g = x.entries();
    for (std::size_t i = 0; i < x.dim(); ++i) {
      if (std::abs(g(i, i) - cplx{1.0, 0.0}) > kUnitDiagTol)
        throw invalid_input("GramMatrix: diagonal entry " + std::to_string(i) +
                            " is not 1");
      g(i, i) = cplx{1.0, 0.0};
      for (std::size_t j = 0; j < x.dim(); ++j) {
        if (i == j) continue;
        const double mag = std::abs(g(i, j));
        if (mag > 1.0 + kUnitDiagTol)
          throw invalid_input("GramMatrix: entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") has magnitude " +
                              std::to_string(mag) + " > 1");
        if (mag > 1.0) g(i, j) /= mag;
      }
    }
    return HermitianMatrix(g);
  }

  static HermitianMatrix power(const HermitianMatrix& base, long long m) {
    const std::size_t n = base.dim();
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      g(i, i) = cplx{1.0, 0.0};
      for (std::size_t j = i + 1; j < n; ++j) {
        const cplx v = detail::ipow(base(i, j), m);
        g(i, j) = v;
        g(j, i) = std::conj(v);
      }
    }
    return HermitianMatrix(g);
  }

  long long copies_;
  HermitianMatrix base_;
  HermitianMatrix powered_;
};

inline GramMatrix gram(const StateSet& s) { return GramMatrix(s); }

struct IndependenceVerdict {
  bool independent = false;
  double min_eigenvalue = 0.0;
  double threshold = 0.0;
};

// Independent iff the powered Gram is positive definite beyond the
// size-scaled PSD slack.
inline IndependenceVerdict linear_independence(const GramMatrix& g) {
  const auto ed = eig_hermitian(g.powered());
  IndependenceVerdict v;
  v.min_eigenvalue = ed.eigenvalues.front();
  v.threshold = kRelPsdTol * static_cast<double>(g.size());
  v.independent = v.min_eigenvalue > v.threshold;
  return v;
}

inline IndependenceVerdict linear_independence(const StateSet& s) {
  return linear_independence(gram(s));
}

}  // namespace discrimkit
