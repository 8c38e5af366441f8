#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "discrimkit/errors.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/state_set.hpp"
#include "discrimkit/tolerances.hpp"

namespace discrimkit {

inline constexpr double kProbSlack = 1e-12;
inline constexpr double kCurveBisectTol = 1e-12;

// Pair-discrimination instance: single-copy overlap <psi_+|psi_-> and the
// copy count; p_ip is the M-copy overlap driving every bound below.
struct TwoStateProblem {
  cplx overlap;
  long long copies;
  cplx p_ip;

  TwoStateProblem(cplx overlap_in, long long copies_in)
      : overlap(overlap_in), copies(copies_in) {
    if (copies < 1)
      throw invalid_input("TwoStateProblem: copies must be >= 1, got " +
                          std::to_string(copies));
    const double mag = std::abs(overlap);
    if (mag > 1.0 + kProbSlack)
      throw invalid_input("TwoStateProblem: |overlap| = " +
                          std::to_string(mag) + " exceeds 1");
    if (mag > 1.0) overlap /= mag;
    p_ip = detail::ipow(overlap, copies);
  }
};

// One (P_D, P_E) pair per state; inconclusive rates are the remainders.
struct TwoStateOperatingPoint {
  double p_d_plus;
  double p_d_minus;
  double p_e_plus;
  double p_e_minus;

  TwoStateOperatingPoint(double dp, double dm, double ep, double em)
      : p_d_plus(dp), p_d_minus(dm), p_e_plus(ep), p_e_minus(em) {
    for (double v : {dp, dm, ep, em, p_i_plus(), p_i_minus()})
      if (v < -kProbSlack || v > 1.0 + kProbSlack)
        throw invalid_input(
            "TwoStateOperatingPoint: probability " + std::to_string(v) +
            " outside [0, 1]");
  }

  double p_i_plus() const { return 1.0 - p_d_plus - p_e_plus; }
  double p_i_minus() const { return 1.0 - p_d_minus - p_e_minus; }
};

// Slack of the necessary condition
//   P_I^+ P_I^- >= |P_IP - sqrt(P_D^+ P_E^-) - sqrt(P_D^- P_E^+)|^2.
// Nonnegative slack means the operating point is admissible.
inline double general_bound_check(const TwoStateProblem& prob,
                                  const TwoStateOperatingPoint& pt) {
  const cplx inner =
      prob.p_ip -
      std::sqrt(std::max(0.0, pt.p_d_plus * pt.p_e_minus)) -
      std::sqrt(std::max(0.0, pt.p_d_minus * pt.p_e_plus));
  return pt.p_i_plus() * pt.p_i_minus() - std::norm(inner);
}

// Best average success probability with no inconclusive outcome:
// (1 + sqrt(1 - |P_IP|^2)) / 2.
inline double helstrom(const TwoStateProblem& prob) {
  const double m = std::abs(prob.p_ip);
  return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - m * m)));
}

// Maximum average success when errors are forbidden: 1 - |overlap|^M.
inline double idp_limit(const TwoStateProblem& prob) {
  return 1.0 - std::abs(prob.p_ip);
}

namespace detail {

inline double require_real_unit_p_ip(const TwoStateProblem& prob,
                                     const char* op) {
  if (std::abs(prob.p_ip.imag()) > kProbSlack)
    throw invalid_input(std::string(op) +
                        ": M-copy overlap is not real; discrimination "
                        "without inconclusive outcomes is impossible");
  const double s = prob.p_ip.real();
  if (s < -kProbSlack)
    throw invalid_input(std::string(op) +
                        ": M-copy overlap is negative; rephase the states "
                        "to a nonnegative overlap first");
  return std::min(1.0, std::max(0.0, s));
}

}  // namespace detail

// Solves  P_IP = sqrt(p(1-q)) + sqrt(q(1-p))  for q = P_D^- given
// p = P_D^+, picking the largest root (the achievable frontier). The curve
// in q rises on [0, 1-p] and falls on [1-p, 1]; each branch is bisected
// only after a bracket sign check.
inline double zero_inconclusive_curve(const TwoStateProblem& prob,
                                      double p_d_plus) {
  const double s = detail::require_real_unit_p_ip(prob, "zero_inconclusive_curve");
  if (p_d_plus < -kProbSlack || p_d_plus > 1.0 + kProbSlack)
    throw invalid_input("zero_inconclusive_curve: p_d_plus outside [0, 1]");
  const double p = std::min(1.0, std::max(0.0, p_d_plus));
  const auto f = [p](double q) {
    return std::sqrt(std::max(0.0, p * (1.0 - q))) +
           std::sqrt(std::max(0.0, q * (1.0 - p)));
  };
  const double peak = 1.0 - p;
  double lo, hi;
  bool decreasing;
  if (f(1.0) <= s + kCurveBisectTol && s <= 1.0 + kCurveBisectTol) {
    lo = peak;
    hi = 1.0;
    decreasing = true;
  } else if (f(0.0) <= s + kCurveBisectTol) {
    lo = 0.0;
    hi = peak;
    decreasing = false;
  } else {
    throw invalid_input(
        "zero_inconclusive_curve: no P_D^- in [0, 1] pairs with P_D^+ = " +
        std::to_string(p) + " at this overlap");
  }
  while (hi - lo > kCurveBisectTol) {
    const double mid = 0.5 * (lo + hi);
    const bool above = f(mid) > s;
    if (above == decreasing)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Symmetric-case band on sqrt(P_E P_D):
//   (P_IP - P_I)/2 <= sqrt(P_E P_D) <= (P_IP + P_I)/2,
// lower edge clamped to 0 when P_I exceeds P_IP.
struct InterpolationBand {
  double lower = 0.0;
  double upper = 0.0;
  double lower_sq = 0.0;  // band on the product P_E * P_D
  double upper_sq = 0.0;
  bool lower_clamped = false;
};

inline InterpolationBand interpolation_band(const TwoStateProblem& prob,
                                            double p_i) {
  if (std::abs(prob.p_ip.imag()) > kProbSlack)
    throw invalid_input(
        "interpolation_band: M-copy overlap is not real; the symmetric band "
        "is defined for real overlaps");
  if (p_i < -kProbSlack || p_i > 1.0 + kProbSlack)
    throw invalid_input("interpolation_band: p_i outside [0, 1]");
  // a real overlap's sign can be absorbed into one state; only |P_IP| matters
  const double s = std::abs(prob.p_ip.real());
  InterpolationBand band;
  band.upper = 0.5 * (s + p_i);
  band.upper_sq = band.upper * band.upper;
  if (s >= p_i) {
    band.lower = 0.5 * (s - p_i);
    band.lower_sq = band.lower * band.lower;
  } else {
    band.lower = 0.0;
    band.lower_sq = 0.0;
    band.lower_clamped = true;
  }
  return band;
}

// Largest P_D^- compatible with zero errors at a given P_D^+:
// (1 - P_D^+)(1 - P_D^-) >= |P_IP|^2.
inline double zero_error_pair_limit(const TwoStateProblem& prob,
                                    double p_d_plus) {
  if (p_d_plus < -kProbSlack || p_d_plus > 1.0 + kProbSlack)
    throw invalid_input("zero_error_pair_limit: p_d_plus outside [0, 1]");
  const double p = std::min(1.0, std::max(0.0, p_d_plus));
  const double need = std::norm(prob.p_ip);
  if ((1.0 - p) < need - kProbSlack)
    throw invalid_input(
        "zero_error_pair_limit: P_D^+ = " + std::to_string(p) +
        " leaves no zero-error room (needs (1-P_D^+) >= |P_IP|^2)");
  if (need == 0.0) return 1.0;
  return std::max(0.0, 1.0 - need / (1.0 - p));
}

// Decomposition point: total conclusive rate p_s split between detection
// and error in the Helstrom proportion p_h.
struct SeparationPoint {
  double p_s;
  double p_h;
  double p_idp;

  SeparationPoint(double p_s_in, const TwoStateProblem& prob)
      : p_s(p_s_in), p_h(helstrom(prob)), p_idp(idp_limit(prob)) {
    if (p_s < -kProbSlack || p_s > 1.0 + kProbSlack)
      throw invalid_input("SeparationPoint: p_s outside [0, 1]");
    p_s = std::min(1.0, std::max(0.0, p_s));
  }

  double p_d() const { return p_s * p_h; }
  double p_e() const { return p_s * (1.0 - p_h); }
};

struct SeparationBound {
  double bound = 0.0;
  // false when p_s < p_idp: the inequality claims nothing there
  bool condition_met = false;
};

// Error-rate floor  P_E >= (P_S - sqrt(P_S^2 - (P_S - P_IDP)^2)) / 2
// valid when the conclusive rate reaches the zero-error ceiling P_IDP.
inline SeparationBound separation_error_bound(const SeparationPoint& sp) {
  SeparationBound out;
  if (sp.p_s < sp.p_idp) return out;
  out.condition_met = true;
  const double gap = sp.p_s - sp.p_idp;
  const double inside = sp.p_s * sp.p_s - gap * gap;
  out.bound = 0.5 * (sp.p_s - std::sqrt(std::max(0.0, inside)));
  return out;
}

}  // namespace discrimkit
