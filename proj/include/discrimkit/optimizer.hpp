#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "discrimkit/eig.hpp"
#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/state_set.hpp"
#include "discrimkit/strategy.hpp"
#include "discrimkit/two_state.hpp"

namespace discrimkit {

struct ExactOptimum {
  std::vector<double> gamma_star;
  double objective = 0.0;
  double boundary_eigenvalue = 0.0;  // min eigenvalue of X - diag(gamma_star)
  long long iterations = 0;
};

namespace detail {

// Cholesky solve for a small real SPD system, row-major storage.
inline std::vector<double> solve_spd(std::vector<double> a,
                                     std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    double diag = a[k * n + k];
    for (std::size_t j = 0; j < k; ++j) diag -= a[k * n + j] * a[k * n + j];
    if (!(diag > 0.0))
      throw numerical_error("solve_spd: matrix lost positive definiteness");
    const double l = std::sqrt(diag);
    a[k * n + k] = l;
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = a[i * n + k];
      for (std::size_t j = 0; j < k; ++j) v -= a[i * n + j] * a[k * n + j];
      a[i * n + k] = v / l;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t j = 0; j < i; ++j) v -= a[i * n + j] * b[j];
    b[i] = v / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) v -= a[j * n + ii] * b[j];
    b[ii] = v / a[ii * n + ii];
  }
  return b;
}

struct ResidualInfo {
  double min_eigenvalue = 0.0;
  double log_det = 0.0;
  ComplexMatrix inverse{0, 0};
};

inline ResidualInfo residual_info(const ComplexMatrix& x,
                                  const std::vector<double>& gamma,
                                  bool need_inverse) {
  const std::size_t n = gamma.size();
  ComplexMatrix r = x;
  for (std::size_t i = 0; i < n; ++i) r(i, i) -= gamma[i];
  const EigenDecomposition ed = eig_hermitian(HermitianMatrix(r));
  ResidualInfo info;
  info.min_eigenvalue = ed.eigenvalues.front();
  if (info.min_eigenvalue > 0.0) {
    for (double lam : ed.eigenvalues) info.log_det += std::log(lam);
    if (need_inverse) {
      ComplexMatrix scaled(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          scaled(i, k) = ed.eigenvectors(i, k) / ed.eigenvalues[k];
      info.inverse = scaled * ed.eigenvectors.adjoint();
    }
  }
  return info;
}

}  // namespace detail

// Maximizes sum_i p_i gamma_i over gamma with X.powered - diag(gamma) PSD,
// by interior-point path following: Newton steps on
//   p . gamma + tau (log det(X - diag(gamma)) + sum_i log gamma_i)
// for tau shrinking 1 -> 1e-12, then a per-coordinate bisection sweep that
// walks the iterate onto the PSD boundary. Fully deterministic.
inline ExactOptimum maximize_exact(const GramMatrix& x,
                                   const std::vector<double>& priors) {
  const std::size_t n = x.size();
  if (priors.size() != n)
    throw invalid_input("maximize_exact: " + std::to_string(priors.size()) +
                        " priors for " + std::to_string(n) + " states");
  const ComplexMatrix& xm = x.powered().entries();
  const EigenDecomposition xd = eig_hermitian(x.powered());
  const double lam_min = xd.eigenvalues.front();
  if (lam_min <= kRelPsdTol * static_cast<double>(n))
    throw invalid_input(
        "states linearly dependent; exact discrimination probability 0 for "
        "dependent directions");

  ExactOptimum out;
  std::vector<double>& gamma = out.gamma_star;
  gamma.assign(n, std::min(0.9, 0.5 * lam_min));

  const auto barrier_value = [&](const std::vector<double>& g, double tau,
                                 const detail::ResidualInfo& info) {
    double v = tau * info.log_det;
    for (std::size_t i = 0; i < n; ++i)
      v += priors[i] * g[i] + tau * std::log(g[i]);
    return v;
  };

  for (double tau = 1.0; tau > 1e-12; tau *= 0.2) {
    for (int newton = 0; newton < 50; ++newton) {
      ++out.iterations;
      const detail::ResidualInfo info = detail::residual_info(xm, gamma, true);
      if (!(info.min_eigenvalue > 0.0))
        throw numerical_error("maximize_exact: iterate left the interior");
      std::vector<double> grad(n);
      std::vector<double> neg_hess(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        grad[i] =
            priors[i] - tau * info.inverse(i, i).real() + tau / gamma[i];
        for (std::size_t j = 0; j < n; ++j)
          neg_hess[i * n + j] = tau * std::norm(info.inverse(i, j));
        neg_hess[i * n + i] += tau / (gamma[i] * gamma[i]);
      }
      const std::vector<double> step = detail::solve_spd(neg_hess, grad);
      double decrement = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrement += grad[i] * step[i];
      if (decrement < 2e-14) break;

      const double f0 = barrier_value(gamma, tau, info);
      double alpha = 1.0;
      std::vector<double> trial(n);
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
        bool positive = true;
        for (std::size_t i = 0; i < n; ++i) {
          trial[i] = gamma[i] + alpha * step[i];
          if (trial[i] <= 0.0) positive = false;
        }
        if (!positive) continue;
        const detail::ResidualInfo ti = detail::residual_info(xm, trial, false);
        if (!(ti.min_eigenvalue > 0.0)) continue;
        if (barrier_value(trial, tau, ti) >= f0 + 0.25 * alpha * decrement) {
          gamma = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }

  // boundary polish: grow each coordinate until the residual touches zero
  for (int sweep = 0; sweep < 64; ++sweep) {
    double gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double lo = 0.0;
      double hi = 1.0 - gamma[i];
      if (hi <= 0.0) continue;
      std::vector<double> probe = gamma;
      probe[i] = gamma[i] + hi;
      if (detail::residual_info(xm, probe, false).min_eigenvalue >= 0.0) {
        lo = hi;
      } else {
        while (hi - lo > 1e-13) {
          const double mid = 0.5 * (lo + hi);
          probe[i] = gamma[i] + mid;
          if (detail::residual_info(xm, probe, false).min_eigenvalue >= 0.0)
            lo = mid;
          else
            hi = mid;
        }
      }
      gamma[i] += lo;
      gain += priors[i] * lo;
    }
    ++out.iterations;
    if (gain < 1e-10) break;
  }

  out.objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.objective += priors[i] * gamma[i];
  out.boundary_eigenvalue =
      detail::residual_info(xm, gamma, false).min_eigenvalue;
  return out;
}

// Uniform sub-mode: with gamma_i = g the residual is X - gI, so the largest
// feasible g is min(1, lambda_min(X.powered)).
inline ExactOptimum maximize_exact_uniform(const GramMatrix& x,
                                           const std::vector<double>& priors) {
  const std::size_t n = x.size();
  if (priors.size() != n)
    throw invalid_input("maximize_exact_uniform: " +
                        std::to_string(priors.size()) + " priors for " +
                        std::to_string(n) + " states");
  const EigenDecomposition xd = eig_hermitian(x.powered());
  const double lam_min = xd.eigenvalues.front();
  if (lam_min <= kRelPsdTol * static_cast<double>(n))
    throw invalid_input(
        "states linearly dependent; exact discrimination probability 0 for "
        "dependent directions");
  ExactOptimum out;
  const double g = std::min(1.0, lam_min);
  out.gamma_star.assign(n, g);
  for (std::size_t i = 0; i < n; ++i) out.objective += priors[i] * g;
  out.boundary_eigenvalue = lam_min - g;
  out.iterations = 1;
  return out;
}

struct TradeoffPoint {
  double p_i = 0.0;
  double p_d = 0.0;
  double p_e = 0.0;
  double slack = 0.0;  // general_bound_check at the symmetric point
};

// Largest symmetric P_D compatible with the two-state bound at a given
// inconclusive rate: bisects sqrt(P_D (1 - P_I - P_D)) against the lower
// band edge max(0, (P_IP - P_I)/2) on the falling side of the product.
inline TradeoffPoint tradeoff_point(const TwoStateProblem& prob, double p_i) {
  const double s = detail::require_real_unit_p_ip(prob, "tradeoff_point");
  if (p_i < -kProbSlack || p_i > 1.0 + kProbSlack)
    throw invalid_input("tradeoff_point: p_i outside [0, 1]");
  const double pi = std::min(1.0, std::max(0.0, p_i));
  const double target = std::max(0.0, 0.5 * (s - pi));
  const double budget = 1.0 - pi;
  const auto product_root = [&](double pd) {
    return std::sqrt(std::max(0.0, pd * (budget - pd)));
  };
  double lo = 0.5 * budget;  // peak of the product
  double hi = budget;        // zero of the product
  while (hi - lo > kCurveBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (product_root(mid) >= target)
      lo = mid;
    else
      hi = mid;
  }
  TradeoffPoint pt;
  pt.p_i = pi;
  pt.p_d = lo;
  pt.p_e = std::max(0.0, budget - lo);
  pt.slack = general_bound_check(prob, {pt.p_d, pt.p_d, pt.p_e, pt.p_e});
  return pt;
}

// Grid spans [0, P_IP]: the first point is the Helstrom limit, the last
// the zero-error limit.
inline std::vector<TradeoffPoint> tradeoff_scan(const TwoStateProblem& prob,
                                                std::size_t resolution) {
  if (resolution < 2)
    throw invalid_input("tradeoff_scan: resolution must be >= 2");
  const double s = detail::require_real_unit_p_ip(prob, "tradeoff_scan");
  std::vector<TradeoffPoint> pts;
  pts.reserve(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    const double p_i =
        s * static_cast<double>(k) / static_cast<double>(resolution - 1);
    pts.push_back(tradeoff_point(prob, p_i));
  }
  return pts;
}

struct OracleResult {
  double value = 0.0;
  std::string description;
  long long samples_evaluated = 0;
};

// Independent validation oracles for two-state bounds. Both work in the
// 2-dimensional span of the M-copy pair, where only s = |overlap|^M enters:
// psi_+ -> (1, 0), psi_- -> (s, sqrt(1 - s^2)).
//
// outcomes = 2: projective measurement at angle theta, 1e-5 grid, maximizes
// the prior-weighted success rate (no inconclusive outcome).
// outcomes = 3: zero-error triple (a P_-perp, b P_+perp, complement), 1e-3
// grid over (a, b) keeping the complement PSD, maximizes success.
inline OracleResult brute_force_measurement_oracle(const StateSet& s,
                                                   int outcomes) {
  if (s.n() != 2)
    throw invalid_input("brute_force_measurement_oracle: needs exactly 2 "
                        "states, got " + std::to_string(s.n()));
  if (outcomes != 2 && outcomes != 3)
    throw invalid_input("brute_force_measurement_oracle: outcomes must be 2 "
                        "or 3");
  const double base = std::abs(inner_product(s.state(0), s.state(1)));
  const double ov = std::pow(std::min(1.0, base), static_cast<double>(s.copies()));
  const double sx = ov;
  const double sy = std::sqrt(std::max(0.0, 1.0 - ov * ov));
  const double p0 = s.prior(0);
  const double p1 = s.prior(1);

  OracleResult out;
  if (outcomes == 2) {
    const double step = 1e-5;
    double best = 0.0, best_theta = 0.0;
    long long count = 0;
    for (double theta = 0.0; theta < 3.14159265358979323846; theta += step) {
      const double ux = std::cos(theta), uy = std::sin(theta);
      const double hit_plus = ux * ux;               // |<u|psi_+>|^2
      const double in_minus = ux * sx + uy * sy;     // <u|psi_->
      const double succ = p0 * hit_plus + p1 * (1.0 - in_minus * in_minus);
      ++count;
      if (succ > best) {
        best = succ;
        best_theta = theta;
      }
    }
    out.value = best;
    out.description =
        "projective angle theta = " + std::to_string(best_theta);
    out.samples_evaluated = count;
    return out;
  }

  // zero-error scan: effects a |psi_-perp><psi_-perp| and b |psi_+perp><..|
  // with psi_-perp = (sy, -sx), psi_+perp = (0, 1); coarse 1e-3 pass, then
  // a 1e-5 refinement box around the coarse winner
  const double gain = sy * sy;  // |<psi_-perp|psi_+>|^2 = |<psi_+perp|psi_->|^2
  double best = 0.0, best_a = 0.0, best_b = 0.0;
  long long count = 0;
  const auto scan = [&](double a_lo, double a_hi, double b_lo, double b_hi,
                        double step) {
    for (double a = a_lo; a <= a_hi + 1e-12; a += step) {
      for (double b = b_lo; b <= b_hi + 1e-12; b += step) {
        // complement E0 = I - a P_-perp - b P_+perp must be PSD (2x2 test)
        const double e00 = 1.0 - a * gain;
        const double e01 = a * sx * sy;
        const double e11 = 1.0 - a * sx * sx - b;
        ++count;
        if (e00 < 0.0 || e11 < 0.0) continue;
        if (e00 * e11 - e01 * e01 < -1e-15) continue;
        const double succ = (p0 * a + p1 * b) * gain;
        if (succ > best) {
          best = succ;
          best_a = a;
          best_b = b;
        }
      }
    }
  };
  scan(0.0, 1.0, 0.0, 1.0, 1e-3);
  // success is flat along a + b ridges, so box refinement around the coarse
  // winner can miss; instead polish by walking the PSD boundary: for each
  // fine-grid a, bisect the largest feasible b (success rises with b)
  for (double a = 0.0; a <= 1.0 + 1e-12; a += 1e-5) {
    const double e00 = 1.0 - a * gain;
    if (e00 < 0.0) break;
    const double e01 = a * sx * sy;
    const auto feasible = [&](double b) {
      const double e11 = 1.0 - a * sx * sx - b;
      return e11 >= 0.0 && e00 * e11 - e01 * e01 >= -1e-15;
    };
    ++count;
    if (!feasible(0.0)) continue;
    double lo = 0.0, hi = 1.0;
    if (feasible(1.0)) {
      lo = 1.0;
    } else {
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
      }
    }
    const double succ = (p0 * a + p1 * lo) * gain;
    if (succ > best) {
      best = succ;
      best_a = a;
      best_b = lo;
    }
  }
  out.value = best;
  out.description = "zero-error weights a = " + std::to_string(best_a) +
                    ", b = " + std::to_string(best_b);
  out.samples_evaluated = count;
  return out;
}

}  // namespace discrimkit
