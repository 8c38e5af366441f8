#pragma once

namespace discrimkit {

// Scale-relative tolerances shared across all feasibility decisions.
// Both are multiplied by a problem-scale norm, typically max(1, ||A||_F),
// so verdicts do not depend on the absolute size of the instance.
inline constexpr double kRelPsdTol = 1e-9;   // PSD acceptance slack
inline constexpr double kRelRankTol = 1e-9;  // numerical-rank cutoff

// Hermitian inputs may carry this much relative asymmetry before
// construction refuses them (smaller deviations are symmetrized away).
inline constexpr double kRelAsymmetryTol = 1e-8;

// State loading and Gram-matrix sanity bounds.
inline constexpr double kNormWarnTol = 1e-6;   // normalization correction worth warning about
inline constexpr double kPriorSumTol = 1e-12;  // allowed drift of sum(priors) from 1
inline constexpr double kUnitDiagTol = 1e-10;  // Gram diagonal must be this close to 1

}  // namespace discrimkit
