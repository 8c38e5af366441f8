#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/psd.hpp"
#include "discrimkit/state_set.hpp"
#include "discrimkit/tolerances.hpp"

namespace discrimkit {

inline constexpr double kStrategyBudgetSlack = 1e-12;

// Discrimination strategy: detection weights gamma_i plus nonnegative
// misidentification amplitudes t_ij with zero diagonal. Each state's
// outcome budget gamma_i + sum_k t_ik^2 must stay within 1.
class Strategy {
 public:
  Strategy(std::vector<double> gamma, std::vector<std::vector<double>> t)
      : gamma_(std::move(gamma)) {
    const std::size_t n = gamma_.size();
    if (n == 0) throw invalid_input("Strategy: empty gamma");
    if (t.size() != n)
      throw invalid_input("Strategy: t has " + std::to_string(t.size()) +
                          " rows for " + std::to_string(n) + " states");
    t_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (gamma_[i] < 0.0)
        throw invalid_input("Strategy: gamma[" + std::to_string(i) +
                            "] is negative");
      if (t[i].size() != n)
        throw invalid_input("Strategy: t row " + std::to_string(i) +
                            " has length " + std::to_string(t[i].size()));
      double err_sq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = t[i][j];
        if (v < 0.0)
          throw invalid_input("Strategy: t[" + std::to_string(i) + "][" +
                              std::to_string(j) + "] is negative");
        if (i == j && v != 0.0)
          throw invalid_input("Strategy: t[" + std::to_string(i) + "][" +
                              std::to_string(i) + "] must be 0");
        t_[i * n + j] = v;
        err_sq += v * v;
      }
      if (gamma_[i] + err_sq > 1.0 + kStrategyBudgetSlack)
        throw invalid_input("Strategy: state " + std::to_string(i) +
                            " outcome budget gamma + sum t^2 = " +
                            std::to_string(gamma_[i] + err_sq) + " exceeds 1");
    }
  }

  static Strategy exact(std::vector<double> gamma) {
    const std::size_t n = gamma.size();
    return Strategy(std::move(gamma),
                    std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  }

  std::size_t n() const { return gamma_.size(); }
  double gamma(std::size_t i) const { return gamma_[i]; }
  const std::vector<double>& gammas() const { return gamma_; }
  double t(std::size_t i, std::size_t j) const { return t_[i * n() + j]; }

  double error_weight_sq(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n(); ++j) s += t(i, j) * t(i, j);
    return s;
  }

 private:
  std::vector<double> gamma_;
  std::vector<double> t_;  // row-major n x n
};

// B = sqrt(Gamma) + T: diagonal sqrt(gamma_i), off-diagonal t_ij.
inline ComplexMatrix build_b(const Strategy& s) {
  const std::size_t n = s.n();
  ComplexMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = cplx{std::sqrt(s.gamma(i)), 0.0};
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) b(i, j) = cplx{s.t(i, j), 0.0};
  }
  return b;
}

struct FeasibilityReport {
  HermitianMatrix residual;
  PsdVerdict verdict;
  // square-root factor of the residual; empty when infeasible
  ComplexMatrix completion{0, 0};
};

// Strategy (Gamma, T) is realizable on states with Gram x iff
// x.powered - BB^dagger is PSD. Tolerances are taken relative to the
// problem scale max(1, ||x.powered||_F), not the residual's own norm.
inline FeasibilityReport feasibility(const GramMatrix& x, const Strategy& s) {
  if (x.size() != s.n())
    throw invalid_input("feasibility: Gram matrix is " +
                        std::to_string(x.size()) + "x" +
                        std::to_string(x.size()) + " but strategy has n = " +
                        std::to_string(s.n()));
  const ComplexMatrix b = build_b(s);
  const ComplexMatrix diff = x.powered().entries() - b * b.adjoint();
  const double scale = default_psd_scale(x.powered());
  FeasibilityReport r{HermitianMatrix(diff), PsdVerdict{}};
  r.verdict = psd_check(r.residual, scale);
  if (r.verdict.is_psd) r.completion = psd_factor(r.residual, scale);
  return r;
}

struct ProbabilityReport {
  std::vector<double> p_d;  // per-state detection, gamma_i
  std::vector<double> p_e;  // per-state misidentification, sum_k t_ik^2
  std::vector<double> p_i;  // per-state inconclusive remainder
  double avg_d = 0.0;       // prior-weighted aggregates
  double avg_e = 0.0;
  double avg_i = 0.0;
};

inline ProbabilityReport probability_report(const Strategy& s,
                                            const std::vector<double>& priors) {
  const std::size_t n = s.n();
  if (priors.size() != n)
    throw invalid_input("probability_report: " + std::to_string(priors.size()) +
                        " priors for " + std::to_string(n) + " states");
  ProbabilityReport r;
  r.p_d.resize(n);
  r.p_e.resize(n);
  r.p_i.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.p_d[i] = s.gamma(i);
    r.p_e[i] = s.error_weight_sq(i);
    r.p_i[i] = 1.0 - r.p_d[i] - r.p_e[i];
    r.avg_d += priors[i] * r.p_d[i];
    r.avg_e += priors[i] * r.p_e[i];
    r.avg_i += priors[i] * r.p_i[i];
  }
  return r;
}

// Strict row dominance sqrt(gamma_i) > sum_j t_ij. When it holds, B is
// strictly row-diagonally dominant, so BB^dagger is positive definite and
// any feasible Gram matrix is too; it also forces gamma_i > (sum_j t_ij)^2
// >= sum_j t_ij^2, i.e. detection beats misidentification per state.
inline bool dominance_condition(const Strategy& s) {
  for (std::size_t i = 0; i < s.n(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < s.n(); ++j)
      if (i != j) row += s.t(i, j);
    if (!(std::sqrt(s.gamma(i)) > row)) return false;
  }
  return true;
}

// Zero-error specialization: T = 0 reduces the criterion to
// x.powered - diag(gamma) being PSD.
inline PsdVerdict exact_feasibility(const GramMatrix& x,
                                    const std::vector<double>& gamma) {
  if (x.size() != gamma.size())
    throw invalid_input("exact_feasibility: Gram matrix is " +
                        std::to_string(x.size()) + "x" +
                        std::to_string(x.size()) + " but gamma has length " +
                        std::to_string(gamma.size()));
  ComplexMatrix diff = x.powered().entries();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] < 0.0 || gamma[i] > 1.0)
      throw invalid_input("exact_feasibility: gamma[" + std::to_string(i) +
                          "] = " + std::to_string(gamma[i]) +
                          " outside [0, 1]");
    diff(i, i) -= gamma[i];
  }
  return psd_check(HermitianMatrix(diff), default_psd_scale(x.powered()));
}

}  // namespace discrimkit
